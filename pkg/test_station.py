import numpy as np
import pytest
from pydantic import ValidationError

from blindsim.attack import EveKnowledge, EveSlotAction, EveStrategy, generate_faked_state_passive
from blindsim.detectors import PassiveQuenchParams, build_detector
from blindsim.engine.clock import SlotTiming
from blindsim.engine.rng import make_streams
from blindsim.optics import Basis, BasisMechanism, StationTopology, Waveform
from blindsim.station import (
    AliceParams,
    BobReceiver,
    ClickOutcome,
    OutcomeKind,
    SiftedKey,
    VoaController,
    VoaMode,
    VoaSchedule,
    alice_emit,
    bob_voa_level,
    classify_outcome,
    sifted_append,
)

TIMING = SlotTiming(
    tick_ns=1, period_ns=10_000, pulse_offset_ns=5000, window_start_ns=4995, window_end_ns=5015
)
ACTIVE = StationTopology(BasisMechanism.ACTIVE_TWO_DETECTOR)
FOUR = StationTopology()


def test_single_click_is_a_bit():
    outcome = classify_outcome({"D1": 5003.0}, ACTIVE, Basis.DIAGONAL)
    assert outcome.kind is OutcomeKind.BIT1
    assert outcome.bit == 1
    assert outcome.basis is Basis.DIAGONAL
    assert outcome.time_ns == 5003.0


def test_both_detectors_of_an_arm_is_a_double():
    outcome = classify_outcome({"D0": 10_004.0, "D1": 10_002.0}, ACTIVE, Basis.RECTILINEAR, 10_000.0)
    assert outcome.kind is OutcomeKind.DOUBLE
    assert outcome.detectors == ("D0", "D1")
    assert outcome.time_ns == 2.0
    assert outcome.bit is None and outcome.is_multi


def test_four_detector_outcomes():
    assert classify_outcome({"D0_D": 1.0}, FOUR, None).basis is Basis.DIAGONAL
    double = classify_outcome({"D0_D": 1.0, "D1_D": 1.0}, FOUR, None)
    assert (double.kind, double.basis) == (OutcomeKind.DOUBLE, Basis.DIAGONAL)
    multi = classify_outcome({"D0_R": 1.0, "D1_D": 1.0}, FOUR, None)
    assert multi.kind is OutcomeKind.MULTI
    assert classify_outcome({}, FOUR, None).kind is OutcomeKind.NONE


def test_sifting_keeps_matched_single_clicks():
    key = SiftedKey()
    bit0 = ClickOutcome(OutcomeKind.BIT0, ("D0",), 5000.0, Basis.RECTILINEAR)
    assert sifted_append(key, 0, 0, Basis.RECTILINEAR, bit0, eve_bit=0)
    assert not sifted_append(key, 1, 1, Basis.DIAGONAL, bit0)
    assert not sifted_append(key, 2, 1, Basis.RECTILINEAR, ClickOutcome(OutcomeKind.NONE))
    double = ClickOutcome(OutcomeKind.DOUBLE, ("D0", "D1"), 5000.0, Basis.RECTILINEAR)
    assert not sifted_append(key, 3, 1, Basis.RECTILINEAR, double)
    assert len(key) == 1
    assert key.discarded_multi == 1
    assert key.bits[0].eve_bit == 0


def test_alice_emits_her_state_at_the_pulse_time():
    streams = make_streams(9)
    params = AliceParams(mean_photon_number=0.5, channel_loss_db=10.0)

    def emit():
        return alice_emit(
            3, streams["alice-bits"].for_slot(3), streams["alice-basis"].for_slot(3), params, TIMING
        )

    bit, basis, pulse = emit()
    assert pulse.quantum
    assert pulse.start.ns == 35_000
    assert pulse.power == pytest.approx(0.05)
    angles = {
        (Basis.RECTILINEAR, 0): 0.0,
        (Basis.RECTILINEAR, 1): 90.0,
        (Basis.DIAGONAL, 0): 45.0,
        (Basis.DIAGONAL, 1): 135.0,
    }
    assert pulse.polarization == angles[(basis, bit)]
    again = emit()
    assert again[:2] == (bit, basis)


def test_voa_modes():
    fixed = VoaSchedule(mode="fixed", fixed_db=20.0)
    assert bob_voa_level(5, fixed) == 20.0
    scan = VoaSchedule(mode="frequency-scan", pattern_db=(0.0, 10.0, 30.0))
    assert [bob_voa_level(s, scan, phase_offset=1) for s in range(4)] == [10.0, 30.0, 0.0, 10.0]
    iid = VoaSchedule(mode="iid", levels_db=(0.0, 10.0))
    levels = {bob_voa_level(0, iid, np.random.default_rng(s)) for s in range(50)}
    assert levels == {0.0, 10.0}
    with pytest.raises(ValueError):
        bob_voa_level(0, iid)


def test_voa_above_ceiling_is_rejected():
    with pytest.raises(ValidationError, match="exceeds the 80 dB ceiling"):
        VoaSchedule(fixed_db=90.0)
    with pytest.raises(ValidationError):
        VoaSchedule(mode="iid", levels_db=(0.0, -3.0))
    with pytest.raises(ValidationError):
        VoaSchedule(mode="iid", levels_db=())


def test_voa_controller_is_reproducible():
    schedule = VoaSchedule(mode="iid", levels_db=(0.0, 10.0, 20.0, 30.0))
    a = VoaController(schedule, make_streams(4)["bob-voa"])
    b = VoaController(schedule, make_streams(4)["bob-voa"])
    assert [a.level(s) for s in range(200)] == [b.level(s) for s in reversed(range(200))][::-1]
    assert len(a.log) == 200


def test_voa_controller_draws_secret_phase():
    schedule = VoaSchedule(mode=VoaMode.FREQUENCY_SCAN, pattern_db=(0.0, 10.0, 20.0, 30.0))
    controller = VoaController(schedule, make_streams(12)["bob-voa"])
    assert 0 <= controller.phase_offset < 4
    assert VoaController(schedule, make_streams(12)["bob-voa"]).phase_offset == controller.phase_offset
    fixed = VoaSchedule(mode=VoaMode.FREQUENCY_SCAN, phase_offset=3)
    assert VoaController(fixed, make_streams(12)["bob-voa"]).phase_offset == 3


def _passive_bob():
    detectors = {d: build_detector("passive", d, PassiveQuenchParams()) for d in ACTIVE.detector_ids}
    return BobReceiver(ACTIVE, detectors)


def test_blank_and_click_in_matched_and_mismatched_basis():
    bob = _passive_bob()
    knowledge = EveKnowledge(timing=TIMING, hold_power_w=1e-6)
    strategy = EveStrategy(strategy="passive-blind")
    action = EveSlotAction(basis=Basis.RECTILINEAR, bit=1)
    rng = np.random.default_rng(0)

    waveform = generate_faked_state_passive(action, strategy, knowledge, 0)
    matched = bob.measure(0, waveform, Basis.RECTILINEAR, 0.0, TIMING, rng)
    assert matched.kind is OutcomeKind.BIT1
    assert matched.time_ns == 5000.0

    waveform = generate_faked_state_passive(action, strategy, knowledge, 1)
    mismatched = bob.measure(1, waveform, Basis.DIAGONAL, 0.0, TIMING, rng)
    assert mismatched.kind is OutcomeKind.DOUBLE


def test_dark_slot_gives_no_click():
    outcome = _passive_bob().measure(0, Waveform(), Basis.RECTILINEAR, 0.0, TIMING, np.random.default_rng(0))
    assert outcome.kind is OutcomeKind.NONE


def test_receiver_needs_every_port():
    with pytest.raises(ValueError):
        BobReceiver(FOUR, {"D0": build_detector("passive", "D0", PassiveQuenchParams())})


def test_active_receiver_chooses_a_basis():
    bob = _passive_bob()
    assert bob.active_basis_choice
    assert bob.choose_basis(np.random.default_rng(0)) in (Basis.RECTILINEAR, Basis.DIAGONAL)
    four = BobReceiver(
        FOUR, {d: build_detector("passive", d, PassiveQuenchParams()) for d in FOUR.detector_ids}
    )
    assert four.choose_basis(np.random.default_rng(0)) is None


def test_drawing_from_one_stream_leaves_the_others_alone():
    untouched = make_streams(9)["alice-bits"].for_slot(0).random(4)
    streams = make_streams(9)
    streams["eve-basis"].for_slot(0).random(1000)
    streams["bob-voa"].for_setup().integers(10, size=50)
    assert np.array_equal(streams["alice-bits"].for_slot(0).random(4), untouched)
