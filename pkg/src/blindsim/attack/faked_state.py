"""Waveforms Eve sends to Bob: blinding carriers with faked states riding on them."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..detectors.characterize import ThresholdProfile
from ..engine.clock import SlotTiming
from ..exceptions import UserError
from ..optics import BB84_ANGLES, OpticalSegment, Waveform, bb84_state
from .strategy import MAX_COMPENSATION_DB, EveSlotAction, EveStrategy, EveVariant


@dataclass(frozen=True)
class EveKnowledge:
    """What Eve knows about Bob's receiver: its public design and (by assumption) its detectors."""

    timing: SlotTiming
    target_gain: float = 1.0
    """Fraction of her emitted polarized power reaching the matched detector."""

    thresholds: ThresholdProfile | None = None
    sag_power_w: float = 0.0
    """Largest bias-sag blinding boundary among Bob's detectors."""

    hold_power_w: float = 0.0
    """Largest hold power among Bob's passively quenched detectors."""

    @property
    def unpolarized_gain(self) -> float:
        """Fraction of unpolarized emitted power reaching each detector."""
        return self.target_gain / 2.0


def control_interval(thresholds: ThresholdProfile, index: int = 0) -> tuple[float, bool]:
    """Faked-state power at the target detector and whether it gives Eve full control.

    The control interval is ``[max P_100%, 2·min P_0%]``. Its midpoint is used when it is not empty;
    control is claimed only when it has positive width, matching the strict ratio test. Otherwise
    ``max P_100%`` is returned and the flag is cleared.
    """
    points = [
        thresholds.at(detector_id, min(index, thresholds.sample_count(detector_id) - 1))
        for detector_id in thresholds.detector_ids
    ]
    highest_always = max(p.always_click_w for p in points)
    lowest_never_doubled = 2.0 * min(p.never_click_w for p in points)
    if highest_always <= lowest_never_doubled:
        return (highest_always + lowest_never_doubled) / 2.0, highest_always < lowest_never_doubled
    return highest_always, False


def fake_power(strategy: EveStrategy, knowledge: EveKnowledge, index: int = 0) -> tuple[float, bool]:
    """Faked-state power at the target detector, knowledge error applied."""
    if strategy.fake_power_w is not None:
        power, feasible = strategy.fake_power_w, True
        if knowledge.thresholds is not None:
            _, feasible = control_interval(knowledge.thresholds, index)
    elif knowledge.thresholds is not None:
        power, feasible = control_interval(knowledge.thresholds, index)
    else:
        raise UserError("Eve needs either fake_power_w or the detectors' threshold profile")
    return power * (1.0 + strategy.knowledge_error), feasible


def apply_power_compensation(
    waveform: Waveform, gain_db: float, max_gain_db: float = MAX_COMPENSATION_DB
) -> Waveform:
    """Multiplies every power by ``10^(gain/10)``."""
    if gain_db < 0 or gain_db > max_gain_db or not math.isfinite(gain_db):
        raise ValueError(f"compensation gain must be within [0, {max_gain_db:g}] dB, got {gain_db}")
    if gain_db == 0:
        return waveform
    return waveform.map(10.0 ** (gain_db / 10.0))


def generate_faked_state_active(
    action: EveSlotAction,
    strategy: EveStrategy,
    knowledge: EveKnowledge,
    slot: int,
) -> Waveform:
    """Blinding carrier (CW, or a pulse train at the strategy's rate) plus one faked pulse at Alice's
    pulse time polarized in Eve's measured state. Abstaining slots get the carrier only."""
    timing = knowledge.timing
    start, end = timing.slot_start(slot).ns, timing.slot_end(slot).ns
    pulse_at = timing.pulse_time(slot).ns
    variant = strategy.effective_variant
    fake_emitted = 0.0
    if not action.abstain:
        fake_emitted = (action.fake_power_w or 0.0) / knowledge.target_gain

    if variant is EveVariant.ACTIVE_BLIND_CW:
        carrier = _carrier_emitted(strategy, knowledge)
        if action.abstain or fake_emitted == 0:
            return Waveform((_segment(timing, start, end - start, carrier, dop=0.0),))
        total = carrier + fake_emitted
        return Waveform(
            (
                _segment(timing, start, pulse_at - start, carrier, dop=0.0),
                _segment(
                    timing,
                    pulse_at,
                    strategy.fake_pulse_ns,
                    total,
                    polarization=_angle(action),
                    dop=fake_emitted / total,
                ),
                _segment(
                    timing,
                    pulse_at + strategy.fake_pulse_ns,
                    end - pulse_at - strategy.fake_pulse_ns,
                    carrier,
                    dop=0.0,
                ),
            )
        )

    peak = strategy.pulse_peak_w / knowledge.unpolarized_gain
    segments = [
        _segment(timing, a, b - a, peak, dop=0.0)
        for a, b in blinding_pulse_train(slot, timing, strategy.rate_hz, strategy.pulse_width_ns)
    ]
    if not action.abstain and fake_emitted > 0:
        segments.append(
            _segment(timing, pulse_at, strategy.fake_pulse_ns, fake_emitted, polarization=_angle(action))
        )
    return Waveform(tuple(sorted(segments, key=lambda s: s.start.ticks)))


def generate_faked_state_passive(
    action: EveSlotAction,
    strategy: EveStrategy,
    knowledge: EveKnowledge,
    slot: int,
) -> Waveform:
    """CW light that goes dark for ``blank_ns`` right before Alice's pulse time and comes back
    polarized in Eve's state for ``polarized_ns`` before reverting to balanced light."""
    timing = knowledge.timing
    start, end = timing.slot_start(slot).ns, timing.slot_end(slot).ns
    click_at = timing.pulse_time(slot).ns
    carrier = _carrier_emitted(strategy, knowledge)
    if action.abstain:
        return Waveform((_segment(timing, start, end - start, carrier, dop=0.0),))

    blank_start = click_at - strategy.blank_ns
    polarized_end = click_at + strategy.polarized_ns
    segments = []
    if blank_start > start:
        segments.append(_segment(timing, start, blank_start - start, carrier, dop=0.0))
    if strategy.blank_ns > 0:
        segments.append(_segment(timing, blank_start, strategy.blank_ns, 0.0, dop=0.0))
    segments.append(
        _segment(timing, click_at, strategy.polarized_ns, carrier, polarization=_angle(action))
    )
    if polarized_end < end:
        segments.append(_segment(timing, polarized_end, end - polarized_end, carrier, dop=0.0))
    return Waveform(tuple(segments))


def generate_after_gate(
    action: EveSlotAction,
    strategy: EveStrategy,
    knowledge: EveKnowledge,
    slot: int,
) -> Waveform:
    """One faked pulse ``after_gate_offset_ns`` after the falling edge of the slot's gate; nothing
    else, and nothing at all when Eve abstains."""
    gate = knowledge.timing.gate
    if gate is None:
        raise UserError("the after-gate attack needs a gated receiver")
    if action.abstain or not action.fake_power_w:
        return Waveform()
    at = gate.gate_end(slot) + strategy.after_gate_offset_ns
    emitted = action.fake_power_w / knowledge.target_gain
    return Waveform(
        (_segment(knowledge.timing, at, strategy.fake_pulse_ns, emitted, polarization=_angle(action)),)
    )


def blinding_pulse_train(
    slot: int, timing: SlotTiming, rate_hz: float, width_ns: int
) -> list[tuple[int, int]]:
    """``[start, end)`` of the blinding pulses of one slot, in absolute ns.

    Pulses sit on the global grid ``round(k·1e9/rate)``; ones that would overlap the registration
    window are moved just past it (or before it when the slot has no room left), and overlapping
    pulses merge.
    """
    period = 1e9 / rate_hz
    start, end = timing.slot_start(slot).ns, timing.slot_end(slot).ns
    w0, w1 = (int(t) for t in timing.window(slot))
    tick = timing.tick_ns
    width = max(tick, -(-width_ns // tick) * tick)

    pulses: list[tuple[int, int]] = []
    for k in range(math.floor(start / period), math.ceil(end / period) + 1):
        t = int(round(k * period / tick)) * tick
        if not start <= t < end:
            continue
        if t < w1 and t + width > w0:
            t = w1
        if t + width > end:
            t = end - width
            if t < w1 and t + width > w0:
                t = w0 - width
        if t < start:
            continue
        pulses.append((t, t + width))

    merged: list[tuple[int, int]] = []
    for a, b in sorted(pulses):
        if merged and a <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    return merged


def _carrier_emitted(strategy: EveStrategy, knowledge: EveKnowledge) -> float:
    at_detector = strategy.blinding_power_w
    if at_detector is None:
        if strategy.effective_variant is EveVariant.PASSIVE_BLIND:
            at_detector = 2.0 * knowledge.hold_power_w
        else:
            at_detector = 2.0 * knowledge.sag_power_w
    return at_detector / knowledge.unpolarized_gain


def _angle(action: EveSlotAction) -> float:
    if action.basis is None or action.bit is None:
        raise UserError("a faked state needs Eve's measured basis and bit")
    return BB84_ANGLES[bb84_state(action.basis, action.bit)]


def _segment(
    timing: SlotTiming,
    start_ns: int,
    duration_ns: int,
    power: float,
    polarization: float = 0.0,
    dop: float = 1.0,
) -> OpticalSegment:
    return OpticalSegment(
        start=timing.ticks(start_ns),
        duration=timing.ticks(duration_ns),
        power=power,
        polarization=polarization,
        dop=dop,
    )
