"""Actively quenched APD with a fixed bias supply and a TEC-stabilized junction.

Photocurrent through ``R_bias`` sags the APD voltage; bright enough light pushes it below breakdown and
the detector answers only to classical pulses above its comparator band (linear mode). Heating the
junction past what the cooler can remove raises the breakdown voltage to the same effect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..exceptions import UserError
from ..optics import OpticalSegment, sample_photocount
from . import _geiger
from .damage import check_damage
from .events import DetectorEvent, DetectorMode, ModeChange
from .params import ActiveQuenchParams


@dataclass(frozen=True)
class ActiveQuenchState:
    mode: DetectorMode
    temperature_k: float
    v_apd: float
    last_event_ns: float = 0.0
    ready_at_ns: float = 0.0
    """End of the dead time after the last Geiger click."""

    last_power_w: float = 0.0
    """Incident power of the previous segment; the comparator fires on rises above it."""

    sag_until_ns: float = -math.inf
    """Until when the bias network is still recovering from the last bias sag."""

    @classmethod
    def initial(cls, params: ActiveQuenchParams, time_ns: float = 0.0) -> ActiveQuenchState:
        return cls(
            mode=DetectorMode.GEIGER,
            temperature_k=params.reference_temperature_k,
            v_apd=params.bias_v,
            last_event_ns=time_ns,
            ready_at_ns=time_ns,
        )

    def thermally_blinded(self, params: ActiveQuenchParams) -> bool:
        return params.breakdown_v(self.temperature_k) > params.bias_v


def active_bias(
    p_cw: float, params: ActiveQuenchParams, temperature_k: float
) -> tuple[float, DetectorMode]:
    """APD voltage and mode under CW illumination ``p_cw``.

    Linear exactly when ``V_apd < V_br(T)``, i.e. when ``p_cw`` exceeds
    ``(V_bias − V_br(T)) / (R_bias·S)``.
    """
    if p_cw < 0:
        raise ValueError(f"incident power must be non-negative, got {p_cw}")
    v_apd = params.bias_v - params.responsivity_a_per_w * p_cw * params.bias_resistor_ohm
    headroom = params.bias_v - params.breakdown_v(temperature_k)
    if headroom < 0:
        return v_apd, DetectorMode.LINEAR
    boundary = headroom / (params.bias_resistor_ohm * params.responsivity_a_per_w)
    return v_apd, DetectorMode.LINEAR if p_cw > boundary else DetectorMode.GEIGER


def linear_click(
    p_pulse: float,
    band: tuple[float, float],
    rng: np.random.Generator | None,
) -> bool:
    """Comparator decision in linear mode, linear in power across the band.

    Draws from ``rng`` only inside ``[P_0%, P_100%)``.
    """
    never, always = band
    if p_pulse >= always:
        return True
    if p_pulse < never or always <= never:
        return False
    if rng is None:
        raise UserError("a random generator is needed inside the threshold band")
    return bool(rng.random() < (p_pulse - never) / (always - never))


def thermal_step(
    state: ActiveQuenchState,
    avg_power_w: float,
    dt_ns: float,
    params: ActiveQuenchParams,
) -> ActiveQuenchState:
    """One explicit Euler step of the lumped junction temperature, saturating cooler included."""
    if dt_ns <= 0:
        raise ValueError(f"thermal step must be positive, got {dt_ns} ns")
    if state.mode is DetectorMode.DEAD:
        return state
    heat = params.heat_fraction * avg_power_w
    removed = min(heat, params.tec_max_w)
    leak = params.thermal_leak_w_per_k * (state.temperature_k - params.reference_temperature_k)
    d_temp = (heat - removed - leak) / params.thermal_capacity_j_per_k * (dt_ns * 1e-9)
    temperature = state.temperature_k + d_temp
    mode = (
        DetectorMode.LINEAR
        if state.v_apd < params.breakdown_v(temperature)
        else DetectorMode.GEIGER
    )
    return replace(state, temperature_k=temperature, mode=mode)


@dataclass(frozen=True)
class BiasSpan:
    """How the bias behaves across one segment."""

    linear_end_ns: float
    """The detector is linear on ``[t0, linear_end_ns)`` and Geiger-capable afterwards."""

    sag_until_ns: float
    v_apd: float
    mode: DetectorMode
    """Mode at the end of the segment."""

    events: list[DetectorEvent]


def bias_span(
    state: ActiveQuenchState,
    params: ActiveQuenchParams,
    power: float,
    t0: float,
    t1: float,
) -> BiasSpan:
    v_apd, mode = active_bias(power, params, state.temperature_k)
    sagging = power > 0 and mode is DetectorMode.LINEAR and not state.thermally_blinded(params)
    sag_until = t1 + params.bias_recovery_ns if sagging else state.sag_until_ns
    if mode is DetectorMode.LINEAR:
        linear_end = t1
    else:
        linear_end = min(t1, max(t0, state.sag_until_ns))

    events: list[DetectorEvent] = []
    if linear_end > t0:
        if state.mode is DetectorMode.GEIGER:
            reason = "bias-sag" if sagging or state.sag_until_ns > t0 else "thermal"
            events.append(ModeChange(t0, DetectorMode.LINEAR, reason))
        if linear_end < t1:
            events.append(ModeChange(linear_end, DetectorMode.GEIGER, "recovered"))
    elif state.mode is DetectorMode.LINEAR:
        events.append(ModeChange(t0, DetectorMode.GEIGER, "recovered"))

    if linear_end < t1:
        final_mode = DetectorMode.GEIGER
    else:
        final_mode = DetectorMode.LINEAR
        if not sagging and state.sag_until_ns >= t1:
            v_apd = min(v_apd, state.v_apd)
    return BiasSpan(linear_end, sag_until, v_apd, final_mode, events)


def active_step(
    state: ActiveQuenchState,
    params: ActiveQuenchParams,
    segment: OpticalSegment,
    rng: np.random.Generator | None = None,
    window: _geiger.Window | None = None,
) -> tuple[ActiveQuenchState, list[DetectorEvent]]:
    t0, t1 = float(segment.start.ns), float(segment.end.ns)
    if t0 < state.last_event_ns:
        raise UserError(
            f"segment at {t0} ns precedes the detector's last event at {state.last_event_ns} ns"
        )
    power = 0.0 if segment.quantum else segment.power
    state, events = check_damage(power, params, state, t0)
    if state.mode is DetectorMode.DEAD:
        return replace(state, last_event_ns=t1, last_power_w=power), events

    span = bias_span(state, params, power, t0, t1)
    events.extend(span.events)
    firing = _geiger.Firing()
    ready = state.ready_at_ns

    if span.linear_end_ns > t0:
        rise = power - state.last_power_w
        if rise > 0 and t0 >= ready and linear_click(rise, params.band, rng):
            firing.add(t0, window)
            ready = t0 + params.dead_time_ns

    if span.linear_end_ns < t1:
        start = span.linear_end_ns
        if segment.quantum and segment.power > 0 and start == t0 and t0 >= ready:
            if rng is None:
                raise UserError("a random generator is needed to sample a quantum pulse")
            if sample_photocount(segment.power, params.efficiency, rng) >= 1:
                firing.add(t0, window)
                ready = t0 + params.dead_time_ns
        rate = params.dark_count_rate_hz + params.photon_rate_hz(power)
        _geiger.fire(start, t1, ready, rate, params.dead_time_ns, rng, window, into=firing)
        if firing.last_click_ns is not None:
            ready = max(ready, firing.last_click_ns + params.dead_time_ns)

    events.extend(firing.events())
    return (
        ActiveQuenchState(
            mode=span.mode,
            temperature_k=state.temperature_k,
            v_apd=span.v_apd,
            last_event_ns=t1,
            ready_at_ns=ready,
            last_power_w=power,
            sag_until_ns=span.sag_until_ns,
        ),
        events,
    )
