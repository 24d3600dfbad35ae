import numpy as np
import pytest

from blindsim.detectors import (
    ActiveQuenchDetector,
    ActiveQuenchParams,
    GatedDetector,
    GatedParams,
    ThresholdPoint,
    ThresholdProfile,
    characterize_thresholds,
)
from blindsim.exceptions import IncompleteProfileError, UnbracketedBandError

GRID = np.linspace(0.0, 20e-6, 201)


def test_active_band_is_recovered():
    detector = ActiveQuenchDetector("D0", ActiveQuenchParams())
    profile = characterize_thresholds(detector, GRID, 200, np.random.default_rng(11))
    [point] = profile.points["D0"]
    assert point.never_click_w == pytest.approx(4e-6, abs=0.2e-6)
    assert point.always_click_w == pytest.approx(7e-6, abs=0.2e-6)
    assert profile.not_linear == frozenset()


def test_characterization_leaves_the_detector_untouched():
    detector = ActiveQuenchDetector("D0", ActiveQuenchParams())
    before = detector.state
    characterize_thresholds(detector, GRID, 20, np.random.default_rng(0))
    assert detector.state == before
    assert detector.log.clicks == []


def test_gated_after_gate_band_per_sample_index():
    params = GatedParams(after_gate_window_ns=4)
    detector = GatedDetector("D0", params)
    profile = characterize_thresholds(detector, GRID, 100, np.random.default_rng(7))
    assert profile.sample_count("D0") == 4
    for point in profile.points["D0"]:
        assert point.never_click_w == pytest.approx(4e-6, abs=0.3e-6)
        assert point.always_click_w == pytest.approx(7e-6, abs=0.3e-6)


def test_grid_without_always_click_power_is_unbracketed():
    detector = ActiveQuenchDetector("D3", ActiveQuenchParams())
    with pytest.raises(UnbracketedBandError) as excinfo:
        characterize_thresholds(detector, np.linspace(0.0, 5e-6, 11), 50, np.random.default_rng(0))
    assert excinfo.value.detector_id == "D3"


def test_grid_without_never_click_power_is_unbracketed():
    detector = ActiveQuenchDetector("D0", ActiveQuenchParams())
    with pytest.raises(UnbracketedBandError):
        characterize_thresholds(detector, np.linspace(5e-6, 20e-6, 16), 50, np.random.default_rng(0))


@pytest.mark.parametrize(
    "grid, trials",
    [([], 10), ([2e-6, 1e-6], 10), ([1e-6, 2e-6], 0)],
)
def test_invalid_characterization_arguments(grid, trials):
    detector = ActiveQuenchDetector("D0", ActiveQuenchParams())
    with pytest.raises(ValueError):
        characterize_thresholds(detector, grid, trials, np.random.default_rng(0))


def test_profile_from_bands():
    profile = ThresholdProfile.from_bands({"D0": (4e-6, 7e-6), "D1": [(5e-6, 8e-6), (5.5e-6, 9e-6)]})
    assert profile.detector_ids == ("D0", "D1")
    assert profile.at("D1", 1) == ThresholdPoint(5.5e-6, 9e-6)
    assert len(profile.all_points()) == 3
    with pytest.raises(IncompleteProfileError):
        profile.at("D0", 1)
    with pytest.raises(IncompleteProfileError):
        profile.at("D9", 0)


def test_profiles_merge():
    a = ThresholdProfile.from_bands({"D0": (4e-6, 7e-6)})
    b = ThresholdProfile({"D1": (ThresholdPoint(0.0, 1e-6),)}, frozenset({"D1"}))
    merged = a.merged(b)
    assert merged.detector_ids == ("D0", "D1")
    assert merged.not_linear == frozenset({"D1"})


def test_inverted_point_is_rejected():
    with pytest.raises(ValueError):
        ThresholdPoint(8e-6, 7e-6)


def test_nominal_profile_of_a_bank():
    detectors = [ActiveQuenchDetector(d, ActiveQuenchParams()) for d in ("D0", "D1")]
    profile = ThresholdProfile.from_detectors(detectors)
    assert profile.at("D1", 0).as_tuple() == (4e-6, 7e-6)
