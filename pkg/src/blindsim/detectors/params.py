from __future__ import annotations

import math
from typing import Union

from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import constants


class DetectorParamsBase(BaseModel):
    """Fields every detector model shares."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    efficiency: float = Field(0.5, ge=0.0, le=1.0)
    """Quantum efficiency η."""

    dark_count_rate_hz: float = Field(0.0, ge=0.0)
    """Dark count rate while click-capable. Zero isolates the attack mechanisms."""

    damage_power_w: float = Field(10e-3, gt=0.0)
    """Peak power at the detector that destroys it (latched)."""

    wavelength_nm: float = Field(850.0, gt=0.0)
    """Used only to turn classical power into a photon flux."""

    def photon_rate_hz(self, power_w: float) -> float:
        """Detected photon rate of classical light of the given power."""
        photon_energy = constants.h * constants.c / (self.wavelength_nm * 1e-9)
        return self.efficiency * power_w / photon_energy


class PassiveQuenchParams(DetectorParamsBase):
    """Passively quenched Si APD: the diode capacitance recharges through a large resistor."""

    excess_bias_v: float = 8.0
    """V_excess, the voltage above breakdown the capacitance recharges to."""

    recharge_tau_ns: float = Field(434.0, gt=0.0)
    """RC time constant of the recharge. 434 ns puts the armed point at about 1 μs."""

    armed_fraction: float = Field(0.9, gt=0.0, le=1.0)
    """Fraction of V_excess the capacitance must reach before an avalanche can start."""

    hold_power_w: float = Field(1e-6, gt=0.0)
    """CW power that keeps the junction conducting, holding the capacitance discharged."""

    @model_validator(mode="after")
    def _check_excess_range(self) -> PassiveQuenchParams:
        if not 6.0 <= self.excess_bias_v <= 10.0:
            raise ValueError(f"excess_bias_v must be within 6-10 V, got {self.excess_bias_v}")
        return self

    @property
    def recovery_ns(self) -> float:
        """Time for a fully discharged detector to become click-capable again."""
        if self.armed_fraction >= 1.0:
            return math.inf
        return self.recharge_tau_ns * math.log(1.0 / (1.0 - self.armed_fraction))


class ActiveQuenchParams(DetectorParamsBase):
    """Actively quenched APD with a fixed bias supply fed through R_bias and a TEC-stabilized
    junction temperature."""

    bias_v: float = 108.0
    breakdown_v_ref: float = 100.0
    reference_temperature_k: float = Field(253.0, gt=0.0)
    bias_resistor_ohm: float = Field(10e3, gt=0.0)
    responsivity_a_per_w: float = Field(10.0, gt=0.0)
    """Linear-mode responsivity S (photocurrent per incident watt, gain included)."""

    never_click_power_w: float = Field(4e-6, ge=0.0)
    """P_0%: largest pulse power that never clicks in linear mode."""

    always_click_power_w: float = Field(7e-6, gt=0.0)
    """P_100%: smallest pulse power that always clicks in linear mode."""

    tec_max_w: float = Field(0.625e-3, ge=0.0)
    """Heat the cooler can remove beyond its operating point."""

    thermal_capacity_j_per_k: float = Field(2.5e-6, gt=0.0)
    thermal_leak_w_per_k: float = Field(2.5e-5, ge=0.0)
    breakdown_tempco_v_per_k: float = Field(0.5, gt=0.0)
    heat_fraction: float = Field(1.0, ge=0.0)
    """Heat deposited per incident optical watt."""

    dead_time_ns: float = Field(50.0, ge=0.0)
    bias_recovery_ns: float = Field(1e9 / 70e3, ge=0.0)
    """Time the bias network needs to climb back above breakdown once the light falls below the
    sag boundary. Blinding pulse trains faster than its inverse never let the detector recover."""

    @model_validator(mode="after")
    def _check_bias(self) -> ActiveQuenchParams:
        if self.bias_v <= self.breakdown_v_ref:
            raise ValueError("bias_v must exceed breakdown_v_ref")
        if self.never_click_power_w > self.always_click_power_w:
            raise ValueError("never_click_power_w must not exceed always_click_power_w")
        if self.damage_power_w <= self.always_click_power_w:
            raise ValueError("damage_power_w must exceed always_click_power_w")
        return self

    @property
    def band(self) -> tuple[float, float]:
        return self.never_click_power_w, self.always_click_power_w

    def breakdown_v(self, temperature_k: float) -> float:
        """V_br(T) = V_br0 + β·(T − T0)."""
        return self.breakdown_v_ref + self.breakdown_tempco_v_per_k * (
            temperature_k - self.reference_temperature_k
        )

    def blinding_power_w(self, temperature_k: float | None = None) -> float:
        """CW power at which the bias sag pushes the APD below breakdown."""
        temperature = self.reference_temperature_k if temperature_k is None else temperature_k
        headroom = self.bias_v - self.breakdown_v(temperature)
        return max(headroom, 0.0) / (self.bias_resistor_ohm * self.responsivity_a_per_w)


class GatedParams(ActiveQuenchParams):
    """Gated InGaAs APD: DC-biased below breakdown, lifted above it only during short gates.

    ``bias_v`` is the bias during the gate; the sag and thermal fields act as for the active
    detector.
    """

    wavelength_nm: float = Field(1550.0, gt=0.0)
    gate_period_ns: int = Field(1000, gt=0)
    gate_width_ns: int = Field(3, gt=0)
    gate_offset_ns: int = Field(100, ge=0)
    after_gate_window_ns: int = Field(10, gt=0)
    after_gate_never_click_power_w: float = Field(4e-6, ge=0.0)
    after_gate_always_click_power_w: float = Field(7e-6, gt=0.0)
    after_gate_band_profile: tuple[tuple[float, float], ...] | None = None
    """Optional per-nanosecond ``(P_0%, P_100%)`` after the gate edge; overrides the constant band."""

    dead_time_ns: float = Field(0.0, ge=0.0)

    @model_validator(mode="after")
    def _check_gate(self) -> GatedParams:
        if self.gate_width_ns >= self.gate_period_ns:
            raise ValueError("gate_width_ns must be shorter than gate_period_ns")
        if self.after_gate_never_click_power_w > self.after_gate_always_click_power_w:
            raise ValueError("after-gate band is inverted")
        if self.after_gate_band_profile is not None:
            if len(self.after_gate_band_profile) != self.after_gate_window_ns:
                raise ValueError("after_gate_band_profile needs one entry per ns of the window")
            for p0, p100 in self.after_gate_band_profile:
                if p0 > p100:
                    raise ValueError("after_gate_band_profile has an inverted band")
        return self

    def after_gate_band(self, offset_ns: float) -> tuple[float, float]:
        """Click band of a pulse arriving ``offset_ns`` after the gate's falling edge."""
        if self.after_gate_band_profile is not None:
            index = min(int(offset_ns), len(self.after_gate_band_profile) - 1)
            return self.after_gate_band_profile[index]
        return self.after_gate_never_click_power_w, self.after_gate_always_click_power_w


DetectorParams = Union[PassiveQuenchParams, ActiveQuenchParams, GatedParams]

PARAMS_BY_CLASS: dict[str, type[DetectorParamsBase]] = {
    "passive": PassiveQuenchParams,
    "active": ActiveQuenchParams,
    "gated": GatedParams,
}
