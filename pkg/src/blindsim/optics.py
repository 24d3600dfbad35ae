"""Optical signals and the linear optics of Bob's station.

Powers are watts for classical segments and mean photon numbers for quantum-flagged ones; every
operation here is linear, so both flow through the same arithmetic.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .engine.clock import SimTime


class Basis(str, Enum):
    RECTILINEAR = "R"
    DIAGONAL = "D"


BB84_ANGLES: dict[str, float] = {"H": 0.0, "V": 90.0, "D": 45.0, "A": 135.0}

ANALYZER_HWP_ANGLES: dict[Basis, float] = {Basis.RECTILINEAR: 0.0, Basis.DIAGONAL: 22.5}
"""Half-wave-plate angle in front of the PBS for each analyzer basis."""


def bb84_state(basis: Basis, bit: int) -> str:
    if basis is Basis.RECTILINEAR:
        return "H" if bit == 0 else "V"
    return "D" if bit == 0 else "A"


def _angle(polarization: str | float) -> float:
    if isinstance(polarization, str):
        try:
            return BB84_ANGLES[polarization]
        except KeyError:
            raise ValueError(f"unknown polarization label {polarization!r}") from None
    return float(polarization)


def _malus(delta_deg: float) -> float:
    """cos²(Δθ), exact at multiples of 45°."""
    folded = delta_deg % 180.0
    exact = {0.0: 1.0, 45.0: 0.5, 90.0: 0.0, 135.0: 0.5}
    if folded in exact:
        return exact[folded]
    return math.cos(math.radians(delta_deg)) ** 2


@dataclass(frozen=True)
class OpticalSegment:
    """A piecewise-constant piece of light arriving at some point of the link."""

    start: SimTime
    duration: SimTime
    power: float
    """Watts, or the mean photon number of the pulse when ``quantum`` is set."""

    polarization: float = 0.0
    """Linear polarization angle in degrees (H=0, D=45, V=90, A=135)."""

    dop: float = 1.0
    """Degree of polarization; 0 is unpolarized light that splits evenly everywhere."""

    quantum: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "polarization", _angle(self.polarization))
        if self.power < 0 or not math.isfinite(self.power):
            raise ValueError(f"segment power must be finite and >= 0, got {self.power}")
        if self.duration.ticks <= 0:
            raise ValueError("segment duration must be positive")
        if not 0.0 <= self.dop <= 1.0:
            raise ValueError(f"degree of polarization must be in [0, 1], got {self.dop}")

    @property
    def end(self) -> SimTime:
        return self.start + self.duration

    def scaled(self, factor: float) -> OpticalSegment:
        return replace(self, power=self.power * factor)


@dataclass(frozen=True)
class Waveform:
    """Time-ordered, non-overlapping segments; gaps carry no light."""

    segments: tuple[OpticalSegment, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "segments", tuple(self.segments))
        for previous, current in zip(self.segments, self.segments[1:]):
            if current.start < previous.end:
                raise ValueError(
                    f"segments overlap or are out of order at {current.start.ns} ns "
                    f"(previous ends at {previous.end.ns} ns)"
                )

    def __iter__(self):
        return iter(self.segments)

    def __len__(self) -> int:
        return len(self.segments)

    @property
    def peak_power(self) -> float:
        return max((s.power for s in self.segments if not s.quantum), default=0.0)

    def map(self, factor: float) -> Waveform:
        return Waveform(tuple(s.scaled(factor) for s in self.segments))

    def covering(self, start: SimTime, end: SimTime) -> list[OpticalSegment]:
        """The part of the waveform inside ``[start, end)``, with gaps filled by dark segments."""
        covered: list[OpticalSegment] = []
        cursor = start
        for segment in self.segments:
            if segment.end <= start or segment.start >= end:
                continue
            seg_start = max(segment.start, start)
            seg_end = min(segment.end, end)
            if seg_start > cursor:
                covered.append(_dark(cursor, seg_start))
            covered.append(replace(segment, start=seg_start, duration=seg_end - seg_start))
            cursor = seg_end
        if cursor < end:
            covered.append(_dark(cursor, end))
        return covered


def _dark(start: SimTime, end: SimTime) -> OpticalSegment:
    return OpticalSegment(start=start, duration=end - start, power=0.0, dop=0.0)


def attenuation_factor(attenuation_db: float) -> float:
    return 10.0 ** (-attenuation_db / 10.0)


def apply_attenuation(waveform: Waveform, attenuation_db: float) -> Waveform:
    """Scales every segment by ``10^(−a/10)``; polarization is untouched."""
    if attenuation_db < 0 or not math.isfinite(attenuation_db):
        raise ValueError(f"attenuation must be finite and >= 0 dB, got {attenuation_db}")
    if attenuation_db == 0:
        return waveform
    return waveform.map(attenuation_factor(attenuation_db))


def project_onto_basis(
    segment: OpticalSegment,
    analyzer: Basis,
    hwp_angle: float | None = None,
) -> tuple[float, float]:
    """Splits a segment's power between the transmitted (D0) and reflected (D1) PBS ports.

    The HWP at angle φ maps a polarization θ to 2φ − θ; the PBS transmits along 0°. The unpolarized
    fraction of the light splits evenly.
    """
    phi = ANALYZER_HWP_ANGLES[analyzer] if hwp_angle is None else hwp_angle
    delta = 2.0 * phi - segment.polarization
    share = (1.0 - segment.dop) / 2.0 + segment.dop * _malus(delta)
    p_d0 = segment.power * share
    return p_d0, segment.power - p_d0


def split_passive(segment: OpticalSegment, ratio: float = 0.5) -> tuple[OpticalSegment, OpticalSegment]:
    """The 50/50 beam splitter of the passive basis choice: (rectilinear arm, diagonal arm)."""
    return segment.scaled(ratio), segment.scaled(1.0 - ratio)


def sample_photocount(mean_photon_number: float, efficiency: float, rng: np.random.Generator) -> int:
    """Poisson photocount with mean ``μ·η``."""
    if mean_photon_number < 0:
        raise ValueError(f"mean photon number must be >= 0, got {mean_photon_number}")
    if not 0.0 <= efficiency <= 1.0:
        raise ValueError(f"efficiency must be in [0, 1], got {efficiency}")
    mean = mean_photon_number * efficiency
    if mean == 0.0:
        return 0
    return int(rng.poisson(mean))


class BasisMechanism(str, Enum):
    ACTIVE_TWO_DETECTOR = "active-two-detector"
    PASSIVE_FOUR_DETECTOR = "passive-four-detector"


@dataclass(frozen=True)
class DetectorPort:
    detector_id: str
    basis: Basis
    bit: int


@dataclass(frozen=True)
class StationTopology:
    """Bob's optics between the VOA and the detectors.

    Active basis choice: the optical switch sets the HWP for the chosen basis in front of one PBS
    feeding D0/D1. Passive basis choice: a 50/50 BS feeds a rectilinear PBS arm (D0_R, D1_R) and a
    diagonal HWP+PBS arm (D0_D, D1_D).
    """

    mechanism: BasisMechanism = BasisMechanism.PASSIVE_FOUR_DETECTOR
    split_ratio: float = 0.5

    @property
    def ports(self) -> tuple[DetectorPort, ...]:
        if self.mechanism is BasisMechanism.ACTIVE_TWO_DETECTOR:
            return (
                DetectorPort("D0", Basis.RECTILINEAR, 0),
                DetectorPort("D1", Basis.RECTILINEAR, 1),
            )
        return (
            DetectorPort("D0_R", Basis.RECTILINEAR, 0),
            DetectorPort("D1_R", Basis.RECTILINEAR, 1),
            DetectorPort("D0_D", Basis.DIAGONAL, 0),
            DetectorPort("D1_D", Basis.DIAGONAL, 1),
        )

    @property
    def detector_ids(self) -> tuple[str, ...]:
        return tuple(port.detector_id for port in self.ports)

    @property
    def arms(self) -> tuple[tuple[str, str], ...]:
        """Detector pairs sharing one PBS; a click on both is a double click."""
        ids = self.detector_ids
        return tuple((ids[i], ids[i + 1]) for i in range(0, len(ids), 2))

    @property
    def target_gain(self) -> float:
        """Fraction of the station input reaching the matched detector for a pure BB84 state."""
        if self.mechanism is BasisMechanism.ACTIVE_TWO_DETECTOR:
            return 1.0
        return self.split_ratio

    def port_basis(self, detector_id: str, bob_basis: Basis | None) -> Basis:
        if self.mechanism is BasisMechanism.ACTIVE_TWO_DETECTOR:
            if bob_basis is None:
                raise ValueError("active basis choice needs Bob's basis")
            return bob_basis
        return next(p.basis for p in self.ports if p.detector_id == detector_id)

    def route(
        self, segment: OpticalSegment, bob_basis: Basis | None = None
    ) -> dict[str, float]:
        """Power (or μ) delivered to each detector by one segment."""
        if self.mechanism is BasisMechanism.ACTIVE_TWO_DETECTOR:
            if bob_basis is None:
                raise ValueError("active basis choice needs Bob's basis")
            p_d0, p_d1 = project_onto_basis(segment, bob_basis)
            return {"D0": p_d0, "D1": p_d1}
        rect_arm, diag_arm = split_passive(segment, self.split_ratio)
        p0_r, p1_r = project_onto_basis(rect_arm, Basis.RECTILINEAR)
        p0_d, p1_d = project_onto_basis(diag_arm, Basis.DIAGONAL)
        return {"D0_R": p0_r, "D1_R": p1_r, "D0_D": p0_d, "D1_D": p1_d}

    def route_waveform(
        self,
        segments: Iterable[OpticalSegment],
        bob_basis: Basis | None = None,
    ) -> dict[str, list[OpticalSegment]]:
        """Per-detector scalar traces (unpolarized segments carrying the delivered power)."""
        traces: dict[str, list[OpticalSegment]] = {d: [] for d in self.detector_ids}
        for segment in segments:
            for detector_id, power in self.route(segment, bob_basis).items():
                traces[detector_id].append(replace(segment, power=power, polarization=0.0, dop=0.0))
        return traces

