import math

import numpy as np
import pytest

from blindsim.detectors import (
    ActiveQuenchDetector,
    ActiveQuenchParams,
    ActiveQuenchState,
    Click,
    DetectorDamaged,
    DetectorMode,
    ModeChange,
    active_bias,
    active_step,
    check_damage,
    linear_click,
    thermal_step,
)
from blindsim.engine.clock import SimTime
from blindsim.exceptions import UserError
from blindsim.optics import OpticalSegment

SLOT_NS = 10_000


def _seg(start, duration, power, quantum=False):
    return OpticalSegment(SimTime(start), SimTime(duration), power, dop=0.0, quantum=quantum)


def _clicks(events):
    return [e.time_ns for e in events if isinstance(e, Click)]


def _mode_changes(events):
    return [(e.mode, e.reason) for e in events if isinstance(e, ModeChange)]


def test_blinding_boundary_is_80_microwatts():
    params = ActiveQuenchParams()
    boundary = params.blinding_power_w()
    assert boundary == pytest.approx(80e-6)
    t0 = params.reference_temperature_k
    assert active_bias(boundary, params, t0)[1] is DetectorMode.GEIGER
    assert active_bias(np.nextafter(boundary, math.inf), params, t0)[1] is DetectorMode.LINEAR
    assert active_bias(0.0, params, t0) == (params.bias_v, DetectorMode.GEIGER)


def test_active_bias_rejects_negative_power():
    with pytest.raises(ValueError):
        active_bias(-1e-9, ActiveQuenchParams(), 253.0)


def test_hot_junction_is_linear_without_light():
    params = ActiveQuenchParams()
    _, mode = active_bias(0.0, params, params.reference_temperature_k + 20.0)
    assert mode is DetectorMode.LINEAR
    assert params.blinding_power_w(params.reference_temperature_k + 20.0) == 0.0


@pytest.mark.parametrize(
    "power, expected",
    [(7e-6, True), (10e-6, True), (3.9e-6, False), (0.0, False)],
)
def test_linear_click_outside_band_is_deterministic(power, expected):
    assert linear_click(power, (4e-6, 7e-6), None) is expected


def test_linear_click_inside_band_is_linear_in_power():
    rng = np.random.default_rng(5)
    fraction = np.mean([linear_click(5e-6, (4e-6, 7e-6), rng) for _ in range(20_000)])
    assert fraction == pytest.approx(1 / 3, abs=0.02)
    with pytest.raises(UserError):
        linear_click(5e-6, (4e-6, 7e-6), None)


def test_blinded_detector_clicks_only_on_bright_pulses():
    params = ActiveQuenchParams()
    carrier = 2 * params.blinding_power_w()
    state = ActiveQuenchState.initial(params)

    state, events = active_step(state, params, _seg(0, 1000, carrier))
    assert _mode_changes(events) == [(DetectorMode.LINEAR, "bias-sag")]
    assert state.mode is DetectorMode.LINEAR

    state, events = active_step(state, params, _seg(1000, 1, carrier + 7.5e-6))
    assert _clicks(events) == [1000.0]
    state, events = active_step(state, params, _seg(1001, 999, carrier))
    assert _clicks(events) == []
    state, events = active_step(state, params, _seg(2000, 1, carrier + 3.75e-6))
    assert _clicks(events) == []


def test_blinded_detector_ignores_single_photons():
    params = ActiveQuenchParams(efficiency=1.0)
    carrier = 2 * params.blinding_power_w()
    rng = np.random.default_rng(2)
    state, _ = active_step(ActiveQuenchState.initial(params), params, _seg(0, 1000, carrier))
    # Bias still sagged: no avalanche from a single photon.
    state, events = active_step(state, params, _seg(1000, 1, 1e3, quantum=True), rng)
    assert _clicks(events) == []


def test_bias_stays_sagged_between_fast_pulses():
    params = ActiveQuenchParams()
    state = ActiveQuenchState.initial(params)
    state, events = active_step(state, params, _seg(0, 250, 5e-3))
    assert (DetectorMode.LINEAR, "bias-sag") in _mode_changes(events)

    state, events = active_step(state, params, _seg(250, SLOT_NS - 250, 0.0))
    assert state.mode is DetectorMode.LINEAR
    assert _mode_changes(events) == []

    recovered_at = 250 + params.bias_recovery_ns
    state, events = active_step(state, params, _seg(SLOT_NS, SLOT_NS, 0.0))
    assert state.mode is DetectorMode.GEIGER
    [change] = [e for e in events if isinstance(e, ModeChange)]
    assert change.reason == "recovered"
    assert change.time_ns == pytest.approx(recovered_at)


def test_dead_time_after_a_geiger_click():
    params = ActiveQuenchParams(efficiency=1.0)
    rng = np.random.default_rng(0)
    state = ActiveQuenchState.initial(params)
    times = []
    for start in (0, 30, 60):
        state, events = active_step(state, params, _seg(start, 1, 1e3, quantum=True), rng)
        times += _clicks(events)
        state, _ = active_step(state, params, _seg(start + 1, 29, 0.0), rng)
    assert times == [0.0, 60.0]


def _heat_until_blinded(params, avg_power_w, max_slots):
    state = ActiveQuenchState.initial(params)
    for slot in range(max_slots):
        state = thermal_step(state, avg_power_w, SLOT_NS, params)
        if state.thermally_blinded(params):
            return slot + 1, state
    return None, state


def test_thermal_blinding_time_matches_closed_form():
    params = ActiveQuenchParams()
    heat = 2 * params.tec_max_w
    excess = heat - params.tec_max_w
    steady_rise = excess / params.thermal_leak_w_per_k
    needed = (params.bias_v - params.breakdown_v_ref) / params.breakdown_tempco_v_per_k
    tau_s = params.thermal_capacity_j_per_k / params.thermal_leak_w_per_k
    expected_s = -tau_s * math.log(1 - needed / steady_rise)

    slots, state = _heat_until_blinded(params, heat, 20_000)
    assert slots is not None
    assert slots * SLOT_NS * 1e-9 == pytest.approx(expected_s, rel=0.02)
    assert state.mode is DetectorMode.LINEAR


def test_slow_pulse_train_does_not_heat():
    params = ActiveQuenchParams()
    avg = 5e-3 * 250e-9 * 70e3
    slots, state = _heat_until_blinded(params, avg, 20_000)
    assert slots is None
    assert state.temperature_k == pytest.approx(params.reference_temperature_k)


def test_thermal_step_rejects_empty_step():
    params = ActiveQuenchParams()
    with pytest.raises(ValueError):
        thermal_step(ActiveQuenchState.initial(params), 0.0, 0.0, params)


def test_thermal_blinding_is_logged_once():
    detector = ActiveQuenchDetector("D0", ActiveQuenchParams())
    reasons = []
    for slot in range(12_000):
        for event in detector.end_slot(slot, 1.25e-3, SLOT_NS):
            reasons.append((slot, event.reason))
    assert [r for _, r in reasons] == ["thermal"]
    assert detector.log.first_mode_change("thermal")[0] == reasons[0][0]


def test_bias_must_exceed_breakdown():
    with pytest.raises(ValueError):
        ActiveQuenchParams(bias_v=90.0)
    with pytest.raises(ValueError):
        ActiveQuenchParams(never_click_power_w=8e-6, always_click_power_w=7e-6)


def test_damage_latches_once():
    params = ActiveQuenchParams()
    state = ActiveQuenchState.initial(params)
    same, events = check_damage(9.9e-3, params, state)
    assert same is state and events == []
    dead, events = check_damage(10e-3, params, state, time_ns=42.0)
    assert dead.mode is DetectorMode.DEAD
    assert [type(e) for e in events] == [DetectorDamaged, ModeChange]
    assert events[0].time_ns == 42.0
    assert check_damage(1.0, params, dead) == (dead, [])
