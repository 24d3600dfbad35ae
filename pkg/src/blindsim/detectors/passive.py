"""Passively quenched Si APD.

After an avalanche the diode capacitance is discharged and recharges through the quench resistor.
Bright CW light keeps the junction conducting, which holds the capacitance at zero: the detector is
blind. Taking the light away lets it recharge; light returning after the detector is armed again
produces exactly one avalanche on its rising edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..exceptions import UserError
from ..optics import OpticalSegment, sample_photocount
from . import _geiger
from .damage import check_damage
from .events import DetectorEvent, DetectorMode
from .params import PassiveQuenchParams


@dataclass(frozen=True)
class PassiveQuenchState:
    v_c: float
    """Capacitance voltage above breakdown; 0 is fully discharged."""

    last_event_ns: float = 0.0
    """End of the last segment the detector was stepped across."""

    illuminated: bool = False
    """Whether the last segment held the junction conducting."""

    mode: DetectorMode = DetectorMode.GEIGER

    @classmethod
    def armed(cls, params: PassiveQuenchParams, time_ns: float = 0.0) -> PassiveQuenchState:
        return cls(v_c=params.excess_bias_v, last_event_ns=time_ns)


def passive_recharge(dt_ns: float, params: PassiveQuenchParams) -> float:
    """Capacitance voltage ``dt_ns`` after a full discharge."""
    if dt_ns < 0:
        raise ValueError(f"recharge interval must be non-negative, got {dt_ns}")
    return params.excess_bias_v * (1.0 - math.exp(-dt_ns / params.recharge_tau_ns))


def _relax(v0: float, dt_ns: float, params: PassiveQuenchParams) -> float:
    if dt_ns <= 0:
        return v0
    v_ex = params.excess_bias_v
    return v_ex - (v_ex - v0) * math.exp(-dt_ns / params.recharge_tau_ns)


def _time_to_arm(v0: float, params: PassiveQuenchParams) -> float:
    v_ex = params.excess_bias_v
    target = params.armed_fraction * v_ex
    if v0 >= target:
        return 0.0
    if target >= v_ex:
        return math.inf
    return params.recharge_tau_ns * math.log((v_ex - v0) / (v_ex - target))


def passive_step(
    state: PassiveQuenchState,
    params: PassiveQuenchParams,
    segment: OpticalSegment,
    rng: np.random.Generator | None = None,
    window: _geiger.Window | None = None,
) -> tuple[PassiveQuenchState, list[DetectorEvent]]:
    """Steps the detector across one segment of its incident light.

    ``window`` is the registration window; clicks outside it are reported as stray. Without a window
    every click is registered.
    """
    t0, t1 = float(segment.start.ns), float(segment.end.ns)
    if t0 < state.last_event_ns:
        raise UserError(
            f"segment at {t0} ns precedes the detector's last event at {state.last_event_ns} ns"
        )
    power = 0.0 if segment.quantum else segment.power
    state, events = check_damage(power, params, state, t0)
    if state.mode is DetectorMode.DEAD:
        return replace(state, last_event_ns=t1, illuminated=power > 0), events

    v0 = _relax(state.v_c, t0 - state.last_event_ns, params)
    armed = v0 >= params.armed_fraction * params.excess_bias_v
    firing = _geiger.Firing()

    if power >= params.hold_power_w:
        if armed:
            firing.add(t0, window)
        events.extend(firing.events())
        return PassiveQuenchState(0.0, t1, True, DetectorMode.GEIGER), events

    if segment.quantum and segment.power > 0 and armed:
        if rng is None:
            raise UserError("a random generator is needed to sample a quantum pulse")
        if sample_photocount(segment.power, params.efficiency, rng) >= 1:
            firing.add(t0, window)

    if firing.last_click_ns is not None:
        ready = firing.last_click_ns + params.recovery_ns
    else:
        ready = t0 + _time_to_arm(v0, params)
    rate = params.dark_count_rate_hz + params.photon_rate_hz(power)
    _geiger.fire(t0, t1, ready, rate, params.recovery_ns, rng, window, into=firing)

    if firing.last_click_ns is not None:
        v_end = _relax(0.0, t1 - firing.last_click_ns, params)
    else:
        v_end = _relax(v0, t1 - t0, params)
    events.extend(firing.events())
    return PassiveQuenchState(min(v_end, params.excess_bias_v), t1, False, DetectorMode.GEIGER), events
