import numpy as np
import pytest

from blindsim.attack import (
    EveAttacker,
    EveKnowledge,
    EveSlotAction,
    EveStrategy,
    EveVariant,
    apply_power_compensation,
    blinding_pulse_train,
    control_interval,
    eve_intercept,
    fake_power,
    generate_after_gate,
    generate_faked_state_active,
    generate_faked_state_passive,
)
from blindsim.detectors import ThresholdProfile
from blindsim.engine.clock import GateClock, SimTime, SlotTiming
from blindsim.exceptions import UserError
from blindsim.optics import Basis, BasisMechanism, OpticalSegment, StationTopology, Waveform

TIMING = SlotTiming(
    tick_ns=1, period_ns=10_000, pulse_offset_ns=5000, window_start_ns=4995, window_end_ns=5015
)
ACTIVE = StationTopology(BasisMechanism.ACTIVE_TWO_DETECTOR)
BANDS = ThresholdProfile.from_bands({"D0": (4e-6, 7e-6), "D1": (4e-6, 7e-6)})


def _knowledge(**kwargs):
    defaults = dict(timing=TIMING, target_gain=1.0, thresholds=BANDS, sag_power_w=80e-6)
    defaults.update(kwargs)
    return EveKnowledge(**defaults)


def _pulse(slot=0, mu=0.1, polarization="H"):
    return OpticalSegment(
        TIMING.pulse_time(slot), SimTime(1), mu, polarization=polarization, quantum=True
    )


def _delivered(waveform, slot, basis, topology=ACTIVE):
    """Per-detector power at every instant of the slot, as {detector: [(start, power), ...]}."""
    covered = waveform.covering(TIMING.slot_start(slot), TIMING.slot_end(slot))
    traces = topology.route_waveform(covered, basis)
    return {d: [(s.start.ns, s.power) for s in segs] for d, segs in traces.items()}


def test_control_interval_midpoint():
    power, feasible = control_interval(BANDS)
    assert power == pytest.approx(7.5e-6)
    assert feasible


def test_touching_bands_leave_no_control():
    profile = ThresholdProfile.from_bands({"D0": (4e-6, 7e-6), "D1": (5e-6, 8e-6)})
    power, feasible = control_interval(profile)
    assert power == pytest.approx(8e-6)
    assert not feasible


def test_disjoint_bands_fall_back_to_highest_always_click():
    profile = ThresholdProfile.from_bands({"D0": (2e-6, 7e-6), "D1": (5e-6, 8e-6)})
    assert control_interval(profile) == (8e-6, False)


def test_knowledge_error_scales_fake_power():
    strategy = EveStrategy(strategy="active-blind-cw", knowledge_error=0.1)
    power, feasible = fake_power(strategy, _knowledge())
    assert power == pytest.approx(7.5e-6 * 1.1)
    assert feasible


def test_fake_power_needs_a_source():
    with pytest.raises(UserError):
        fake_power(EveStrategy(strategy="active-blind-cw"), _knowledge(thresholds=None))


def test_cw_faked_state_in_matched_basis_hits_one_detector():
    action = EveSlotAction(basis=Basis.RECTILINEAR, bit=0, fake_power_w=7.5e-6)
    waveform = generate_faked_state_active(action, EveStrategy(strategy="active-blind-cw"), _knowledge(), 0)
    delivered = _delivered(waveform, 0, Basis.RECTILINEAR)
    carrier = 160e-6
    assert delivered["D0"][0] == (0, pytest.approx(carrier))
    assert delivered["D0"][1] == (5000, pytest.approx(carrier + 7.5e-6))
    assert delivered["D1"][1] == (5000, pytest.approx(carrier))


def test_cw_faked_state_in_wrong_basis_splits_evenly():
    action = EveSlotAction(basis=Basis.RECTILINEAR, bit=1, fake_power_w=7.5e-6)
    waveform = generate_faked_state_active(action, EveStrategy(strategy="active-blind-cw"), _knowledge(), 0)
    delivered = _delivered(waveform, 0, Basis.DIAGONAL)
    for detector in ("D0", "D1"):
        assert delivered[detector][1] == (5000, pytest.approx(160e-6 + 3.75e-6))


def test_abstaining_slot_carries_only_the_carrier():
    action = EveSlotAction(basis=Basis.DIAGONAL, abstain=True)
    waveform = generate_faked_state_active(action, EveStrategy(strategy="active-blind-cw"), _knowledge(), 2)
    assert len(waveform) == 1
    assert waveform.segments[0].start.ns == 20_000
    assert waveform.segments[0].dop == 0.0


def test_pulse_train_avoids_the_registration_window():
    for slot in (0, 1, 7):
        pulses = blinding_pulse_train(slot, TIMING, 1e6, 250)
        w0, w1 = TIMING.window(slot)
        assert len(pulses) == 10
        for a, b in pulses:
            assert b - a == 250
            assert b <= w0 or a >= w1
            assert TIMING.slot_start(slot).ns <= a < b <= TIMING.slot_end(slot).ns


def test_slow_pulse_train_has_one_pulse_per_slot():
    assert blinding_pulse_train(0, TIMING, 1e5, 250) == [(0, 250)]


def test_pulsed_rate_must_beat_bias_recovery():
    with pytest.raises(ValueError):
        EveStrategy(strategy="active-blind-pulsed", pulse_rate_hz=7e4)
    assert EveStrategy(strategy="active-blind-pulsed").rate_hz == 1e5
    assert EveStrategy(strategy="thermal-blind").rate_hz == 1e6


def test_passive_faked_state_blanks_before_the_pulse():
    action = EveSlotAction(basis=Basis.DIAGONAL, bit=0)
    knowledge = _knowledge(hold_power_w=1e-6, thresholds=None)
    waveform = generate_faked_state_passive(action, EveStrategy(strategy="passive-blind"), knowledge, 0)
    starts = [(s.start.ns, s.duration.ns, s.power) for s in waveform]
    assert starts == [
        (0, 3000, pytest.approx(4e-6)),
        (3000, 2000, 0.0),
        (5000, 2000, pytest.approx(4e-6)),
        (7000, 3000, pytest.approx(4e-6)),
    ]
    assert waveform.segments[2].polarization == 45.0
    assert waveform.segments[2].dop == 1.0


def test_after_gate_pulse_lands_after_the_falling_edge():
    gate = GateClock(period_ns=1000, offset_ns=100, width_ns=3, after_gate_window_ns=10)
    timing = SlotTiming(1, 1000, 101, 100, 113, gate)
    knowledge = EveKnowledge(timing=timing, thresholds=BANDS)
    strategy = EveStrategy(strategy="after-gate", after_gate_offset_ns=5)
    action = EveSlotAction(basis=Basis.RECTILINEAR, bit=1, fake_power_w=7.5e-6)
    [segment] = generate_after_gate(action, strategy, knowledge, 3).segments
    assert segment.start.ns == 3 * 1000 + 103 + 5
    assert segment.polarization == 90.0
    assert generate_after_gate(EveSlotAction(abstain=True), strategy, knowledge, 3) == Waveform()
    with pytest.raises(UserError):
        generate_after_gate(action, strategy, _knowledge(), 3)


def test_power_compensation():
    waveform = Waveform((OpticalSegment(SimTime(0), SimTime(10), 1e-6),))
    assert apply_power_compensation(waveform, 30.0).segments[0].power == pytest.approx(1e-3)
    assert apply_power_compensation(waveform, 0.0) is waveform
    with pytest.raises(ValueError):
        apply_power_compensation(waveform, 81.0)


def test_power_compensated_strategy_needs_a_blinding_base():
    with pytest.raises(ValueError):
        EveStrategy(strategy="power-compensated", base_strategy="intercept-resend", gain_db=10)
    with pytest.raises(ValueError):
        EveStrategy(strategy="active-blind-cw", base_strategy="active-blind-cw")
    strategy = EveStrategy(strategy="power-compensated", base_strategy="active-blind-cw", gain_db=40)
    assert strategy.effective_variant is EveVariant.ACTIVE_BLIND_CW
    assert strategy.compensation_db == 40


def test_intercept_in_matched_basis_reads_alice_bit():
    rng = np.random.default_rng(8)
    for _ in range(200):
        basis, bit, clicked = eve_intercept(_pulse(mu=50.0, polarization="V"), rng)
        assert clicked
        if basis is Basis.RECTILINEAR:
            assert bit == 1


def test_intercept_on_vacuum_abstains():
    basis, bit, clicked = eve_intercept(_pulse(mu=0.0), np.random.default_rng(0))
    assert bit is None and not clicked
    assert basis in (Basis.RECTILINEAR, Basis.DIAGONAL)


def test_no_attacker_passes_alice_pulse_through():
    attacker = EveAttacker(EveStrategy(), _knowledge())
    pulse = _pulse()
    action = attacker.act(0, pulse, np.random.default_rng(0))
    assert action.waveform == Waveform((pulse,))
    assert action.basis is None


def test_attacker_reports_infeasible_control():
    profile = ThresholdProfile.from_bands({"D0": (4e-6, 5e-6), "D1": (7e-6, 8e-6)})
    attacker = EveAttacker(EveStrategy(strategy="active-blind-cw"), _knowledge(thresholds=profile))
    assert not attacker.control_feasible
    assert attacker.fake_power_w == pytest.approx(8e-6)


def test_attacker_applies_compensation_gain():
    strategy = EveStrategy(strategy="power-compensated", base_strategy="active-blind-cw", gain_db=20)
    attacker = EveAttacker(strategy, _knowledge())
    action = attacker.act(0, _pulse(mu=0.0), np.random.default_rng(0))
    assert action.abstain
    assert action.waveform.peak_power == pytest.approx(320e-6 * 100)


def test_intercept_resend_sends_eve_state():
    strategy = EveStrategy(strategy="intercept-resend")
    attacker = EveAttacker(strategy, _knowledge(), resend_mean_photon_number=0.1)
    action = attacker.act(0, _pulse(mu=50.0, polarization="D"), np.random.default_rng(1))
    [segment] = action.waveform.segments
    assert segment.quantum
    assert segment.power == 0.1
    expected = {(Basis.RECTILINEAR, 0): 0.0, (Basis.RECTILINEAR, 1): 90.0, (Basis.DIAGONAL, 0): 45.0}
    assert segment.polarization == expected.get((action.basis, action.bit), 135.0)
