import math

import numpy as np
import pytest

from blindsim.engine.clock import SimTime
from blindsim.optics import (
    BB84_ANGLES,
    Basis,
    BasisMechanism,
    OpticalSegment,
    StationTopology,
    Waveform,
    apply_attenuation,
    project_onto_basis,
    sample_photocount,
    split_passive,
)


def _seg(start=0, duration=10, power=1e-3, polarization=0.0, dop=1.0, quantum=False):
    return OpticalSegment(SimTime(start), SimTime(duration), power, polarization, dop, quantum)


@pytest.mark.parametrize(
    "power, db, expected",
    [(1e-3, 0.0, 1e-3), (1e-3, 60.0, 1e-9), (0.1, 10.0, 0.01)],
)
def test_apply_attenuation_scales_power(power, db, expected):
    out = apply_attenuation(Waveform((_seg(power=power, polarization=45.0),)), db)
    assert out.segments[0].power == pytest.approx(expected, rel=1e-12)
    assert out.segments[0].polarization == 45.0


def test_attenuations_compose_additively_in_db():
    waveform = Waveform((_seg(power=3e-4), _seg(start=10, power=1e-6)))
    stepwise = apply_attenuation(apply_attenuation(waveform, 7.5), 12.0)
    at_once = apply_attenuation(waveform, 19.5)
    assert [s.power for s in stepwise.segments] == pytest.approx([s.power for s in at_once.segments])


def test_apply_attenuation_rejects_negative_levels():
    with pytest.raises(ValueError):
        apply_attenuation(Waveform((_seg(),)), -1.0)


@pytest.mark.parametrize("label", ["H", "V", "D", "A"])
@pytest.mark.parametrize("basis", [Basis.RECTILINEAR, Basis.DIAGONAL])
def test_projection_conserves_power_and_follows_malus(label, basis):
    segment = _seg(power=2.0, polarization=label)
    p0, p1 = project_onto_basis(segment, basis)
    assert p0 + p1 == pytest.approx(2.0)
    matched = (basis is Basis.RECTILINEAR) == (label in ("H", "V"))
    if matched:
        bit0 = label in ("H", "D")
        assert (p0, p1) == ((2.0, 0.0) if bit0 else (0.0, 2.0))
    else:
        assert p0 == p1 == 1.0


def test_unpolarized_light_splits_evenly():
    p0, p1 = project_onto_basis(_seg(power=4.0, polarization=0.0, dop=0.0), Basis.RECTILINEAR)
    assert p0 == p1 == 2.0


def test_partially_polarized_projection():
    p0, p1 = project_onto_basis(_seg(power=1.0, polarization=0.0, dop=0.5), Basis.RECTILINEAR)
    assert p0 == pytest.approx(0.75)
    assert p1 == pytest.approx(0.25)


def test_split_passive_halves_power():
    rect, diag = split_passive(_seg(power=1.0))
    assert rect.power == diag.power == 0.5


def test_four_detector_route_exposes_all_ports():
    topology = StationTopology(BasisMechanism.PASSIVE_FOUR_DETECTOR)
    assert topology.detector_ids == ("D0_R", "D1_R", "D0_D", "D1_D")
    routed = topology.route(_seg(power=1.0, polarization=BB84_ANGLES["D"]))
    assert routed == {"D0_R": 0.25, "D1_R": 0.25, "D0_D": 0.5, "D1_D": 0.0}
    assert sum(routed.values()) == pytest.approx(1.0)


def test_active_route_needs_a_basis():
    topology = StationTopology(BasisMechanism.ACTIVE_TWO_DETECTOR)
    with pytest.raises(ValueError):
        topology.route(_seg())
    assert topology.target_gain == 1.0
    assert StationTopology().target_gain == 0.5


def test_waveform_rejects_overlaps():
    with pytest.raises(ValueError):
        Waveform((_seg(0, 10), _seg(5, 10)))


def test_covering_fills_gaps_with_dark_segments():
    covered = Waveform((_seg(10, 5),)).covering(SimTime(0), SimTime(20))
    assert [(s.start.ns, s.duration.ns, s.power) for s in covered] == [
        (0, 10, 0.0),
        (10, 5, 1e-3),
        (15, 5, 0.0),
    ]


def test_segment_invariants():
    with pytest.raises(ValueError):
        _seg(power=-1.0)
    with pytest.raises(ValueError):
        OpticalSegment(SimTime(0), SimTime(0), 1.0)


def test_photocount_mean_matches_poisson():
    rng = np.random.default_rng(3)
    counts = [sample_photocount(0.1, 0.5, rng) for _ in range(20_000)]
    mean = 0.05
    sigma = math.sqrt(mean / len(counts))
    assert abs(np.mean(counts) - mean) < 4 * sigma
    assert sample_photocount(0.0, 0.5, rng) == 0
