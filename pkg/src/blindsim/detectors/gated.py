"""Gated InGaAs APD.

The DC bias sits below breakdown; short gates lift it above. Outside the gates the diode is a linear
photodiode, and for a few nanoseconds after each gate the discriminator is still sampled, so a bright
pulse there registers as a click of the gate that just ended.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..engine.clock import GateClock
from ..exceptions import UserError
from ..optics import OpticalSegment, sample_photocount
from . import _geiger
from .active import ActiveQuenchState, bias_span, linear_click
from .damage import check_damage
from .events import DetectorEvent, DetectorMode
from .params import GatedParams


@dataclass(frozen=True)
class GatedState(ActiveQuenchState):
    last_click_gate: int = -(2**62)
    """Index of the last gate that registered a click; one click per gate."""


def gate_clock(params: GatedParams) -> GateClock:
    return GateClock(
        period_ns=params.gate_period_ns,
        offset_ns=params.gate_offset_ns,
        width_ns=params.gate_width_ns,
        after_gate_window_ns=params.after_gate_window_ns,
    )


def gated_step(
    state: GatedState,
    params: GatedParams,
    segment: OpticalSegment,
    clock: GateClock | None = None,
    rng: np.random.Generator | None = None,
    window: _geiger.Window | None = None,
) -> tuple[GatedState, list[DetectorEvent]]:
    """Steps the detector across one segment, cutting it at gate and after-gate edges.

    Only the first piece can carry a rising edge; a pulse already on when the after-gate window opens
    does not trip the discriminator.
    """
    clock = clock or gate_clock(params)
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
    rise = power - state.last_power_w
    clicked_gate = state.last_click_gate
    firing = _geiger.Firing()

    edges = [t0, *clock.boundaries(t0, t1), t1]
    for a, b in zip(edges, edges[1:]):
        phase, gate, offset = clock.phase(a)
        if phase == "idle" or gate == clicked_gate:
            continue
        linear = a < span.linear_end_ns
        if phase == "after-gate" or linear:
            if a != t0 or rise <= 0:
                continue
            band = params.after_gate_band(offset) if phase == "after-gate" else params.band
            if linear_click(rise, band, rng):
                firing.add(a, window)
                clicked_gate = gate
            continue
        if segment.quantum and segment.power > 0 and a == t0:
            if rng is None:
                raise UserError("a random generator is needed to sample a quantum pulse")
            if sample_photocount(segment.power, params.efficiency, rng) >= 1:
                firing.add(a, window)
                clicked_gate = gate
                continue
        rate = params.dark_count_rate_hz + params.photon_rate_hz(power)
        before = firing.count
        _geiger.fire(a, b, a, rate, float(b - a), rng, window, max_clicks=before + 1, into=firing)
        if firing.count > before:
            clicked_gate = gate

    events.extend(firing.events())
    return (
        GatedState(
            mode=span.mode,
            temperature_k=state.temperature_k,
            v_apd=span.v_apd,
            last_event_ns=t1,
            ready_at_ns=t1,
            last_power_w=power,
            sag_until_ns=span.sag_until_ns,
            last_click_gate=clicked_gate,
        ),
        events,
    )
