from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..optics import Basis, Waveform

MIN_PULSED_RATE_HZ = 7e4
DEFAULT_PULSED_RATE_HZ = 1e5
DEFAULT_THERMAL_RATE_HZ = 1e6
MAX_COMPENSATION_DB = 80.0


class EveVariant(str, Enum):
    NONE = "none"
    INTERCEPT_RESEND = "intercept-resend"
    PASSIVE_BLIND = "passive-blind"
    ACTIVE_BLIND_CW = "active-blind-cw"
    ACTIVE_BLIND_PULSED = "active-blind-pulsed"
    THERMAL_BLIND = "thermal-blind"
    AFTER_GATE = "after-gate"
    POWER_COMPENSATED = "power-compensated"

    @property
    def blinds(self) -> bool:
        return self in BLINDING_VARIANTS


BLINDING_VARIANTS = frozenset(
    {
        EveVariant.PASSIVE_BLIND,
        EveVariant.ACTIVE_BLIND_CW,
        EveVariant.ACTIVE_BLIND_PULSED,
        EveVariant.THERMAL_BLIND,
        EveVariant.AFTER_GATE,
    }
)

DETECTOR_CLASSES_BY_VARIANT: dict[EveVariant, frozenset[str]] = {
    EveVariant.PASSIVE_BLIND: frozenset({"passive"}),
    EveVariant.ACTIVE_BLIND_CW: frozenset({"active", "gated"}),
    EveVariant.ACTIVE_BLIND_PULSED: frozenset({"active", "gated"}),
    EveVariant.THERMAL_BLIND: frozenset({"active", "gated"}),
    EveVariant.AFTER_GATE: frozenset({"gated"}),
}


class EveStrategy(BaseModel):
    """What Eve does, and with how much light.

    Powers are given at the detector Eve aims at; the attacker scales them by Bob's public topology
    to get what she emits. Unset powers are derived from her knowledge of Bob's detectors.
    """

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    variant: EveVariant = Field(EveVariant.NONE, alias="strategy")
    base_strategy: EveVariant | None = None
    """Strategy whose waveform ``power-compensated`` amplifies."""

    gain_db: float = Field(0.0, ge=0.0)
    max_gain_db: float = Field(MAX_COMPENSATION_DB, ge=0.0, le=MAX_COMPENSATION_DB)

    fake_power_w: float | None = Field(None, gt=0.0)
    """Faked-state power at the target detector. Default: midpoint of the control interval."""

    blinding_power_w: float | None = Field(None, gt=0.0)
    """CW blinding power at each detector. Default: 2x the bias-sag boundary (active, gated) or
    2x the hold power (passive)."""

    pulse_rate_hz: float | None = Field(None, gt=0.0)
    pulse_width_ns: int = Field(250, gt=0)
    pulse_peak_w: float = Field(5e-3, gt=0.0)
    """Peak power of one blinding pulse at each detector."""

    fake_pulse_ns: int = Field(1, gt=0)
    blank_ns: int = Field(2000, ge=0)
    polarized_ns: int = Field(2000, gt=0)
    after_gate_offset_ns: int = 5
    """Start of the faked pulse after the gate's falling edge; negative values land inside the gate."""

    efficiency: float = Field(1.0, ge=0.0, le=1.0)
    """Eve's own detection efficiency."""

    knowledge_error: float = Field(0.0, gt=-1.0)
    """Relative error of Eve's threshold knowledge; scales the faked-state power by ``1 + e``."""

    resend_mean_photon_number: float | None = Field(None, gt=0.0)

    @model_validator(mode="after")
    def _check_variant(self) -> EveStrategy:
        if self.variant is EveVariant.POWER_COMPENSATED:
            if self.base_strategy is None or not self.base_strategy.blinds:
                raise ValueError("power-compensated needs a blinding base_strategy")
            if self.gain_db > self.max_gain_db:
                raise ValueError(
                    f"compensation gain {self.gain_db} dB exceeds the {self.max_gain_db:g} dB ceiling"
                )
        elif self.base_strategy is not None:
            raise ValueError("base_strategy only applies to power-compensated")
        if self.effective_variant is EveVariant.ACTIVE_BLIND_PULSED and self.rate_hz <= MIN_PULSED_RATE_HZ:
            raise ValueError(
                f"pulsed blinding needs a rate above {MIN_PULSED_RATE_HZ:g} Hz, got {self.rate_hz:g} Hz"
            )
        return self

    @property
    def effective_variant(self) -> EveVariant:
        """The strategy generating the waveform (the base of a power-compensated attack)."""
        if self.variant is EveVariant.POWER_COMPENSATED and self.base_strategy is not None:
            return self.base_strategy
        return self.variant

    @property
    def rate_hz(self) -> float:
        if self.pulse_rate_hz is not None:
            return self.pulse_rate_hz
        if self.effective_variant is EveVariant.THERMAL_BLIND:
            return DEFAULT_THERMAL_RATE_HZ
        return DEFAULT_PULSED_RATE_HZ

    @property
    def compensation_db(self) -> float:
        return self.gain_db if self.variant is EveVariant.POWER_COMPENSATED else 0.0


@dataclass(frozen=True)
class EveSlotAction:
    """Eve's measurement of one slot and the light she sends on to Bob."""

    basis: Basis | None = None
    bit: int | None = None
    abstain: bool = False
    """Eve's own detectors saw nothing; she sends no faked state."""

    waveform: Waveform = field(default_factory=Waveform)
    fake_power_w: float | None = None
    """Faked-state power at the target detector, when a faked state was sent."""

    control_feasible: bool = True
    """False when Eve's known thresholds leave no power that clicks only in the matched basis."""
