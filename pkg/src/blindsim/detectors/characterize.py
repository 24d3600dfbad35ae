from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import IncompleteProfileError, UnbracketedBandError
from ..logger import logger
from ..util._pretty_print import pretty_print_profile
from .bank import DetectorModel
from .events import DetectorMode

DEFAULT_P_LO = 0.001
DEFAULT_P_HI = 0.999


@dataclass(frozen=True)
class ThresholdPoint:
    never_click_w: float
    """P_0%: largest power that (operationally) never clicks."""

    always_click_w: float
    """P_100%: smallest power that (operationally) always clicks."""

    def __post_init__(self) -> None:
        if self.never_click_w < 0 or self.never_click_w > self.always_click_w:
            raise ValueError(
                f"threshold band must satisfy 0 <= P_0% <= P_100%, got "
                f"({self.never_click_w}, {self.always_click_w})"
            )

    def as_tuple(self) -> tuple[float, float]:
        return self.never_click_w, self.always_click_w


@dataclass(frozen=True)
class ThresholdProfile:
    """Per detector and per sample index (time bin after the gate, or a single index), the
    never-click and always-click powers of a blinded detector."""

    points: Mapping[str, tuple[ThresholdPoint, ...]]
    not_linear: frozenset[str] = field(default_factory=frozenset)
    """Detectors characterized while still in Geiger mode; their P_0% is reported as 0."""

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", {k: tuple(v) for k, v in self.points.items()})
        for detector_id, points in self.points.items():
            if not points:
                raise IncompleteProfileError(f"profile for {detector_id} has no sample indices")

    @classmethod
    def from_bands(
        cls, bands: Mapping[str, Sequence[tuple[float, float]] | tuple[float, float]]
    ) -> ThresholdProfile:
        """Builds a profile from ``{detector: (P_0%, P_100%)}`` or ``{detector: [(P_0%, P_100%), ...]}``."""
        points: dict[str, tuple[ThresholdPoint, ...]] = {}
        for detector_id, band in bands.items():
            entries = [band] if isinstance(band[0], (int, float)) else list(band)  # type: ignore[list-item]
            points[detector_id] = tuple(ThresholdPoint(float(p0), float(p100)) for p0, p100 in entries)
        return cls(points)

    @classmethod
    def from_detectors(cls, detectors: Iterable[DetectorModel]) -> ThresholdProfile | None:
        """The configured bands of a bank, i.e. what an attacker with exact knowledge uses."""
        bands = {}
        for detector in detectors:
            profile = detector.nominal_profile()
            if profile is None:
                return None
            bands[detector.detector_id] = list(profile)
        return cls.from_bands(bands)

    @property
    def detector_ids(self) -> tuple[str, ...]:
        return tuple(self.points)

    def sample_count(self, detector_id: str) -> int:
        return len(self._points(detector_id))

    def at(self, detector_id: str, index: int) -> ThresholdPoint:
        points = self._points(detector_id)
        if not 0 <= index < len(points):
            raise IncompleteProfileError(
                f"profile for {detector_id} has no sample index {index} (has {len(points)})"
            )
        return points[index]

    def all_points(self, detector_ids: Iterable[str] | None = None) -> list[ThresholdPoint]:
        ids = self.detector_ids if detector_ids is None else tuple(detector_ids)
        return [point for detector_id in ids for point in self._points(detector_id)]

    def merged(self, other: ThresholdProfile) -> ThresholdProfile:
        return ThresholdProfile({**self.points, **other.points}, self.not_linear | other.not_linear)

    def _points(self, detector_id: str) -> tuple[ThresholdPoint, ...]:
        try:
            return self.points[detector_id]
        except KeyError:
            raise IncompleteProfileError(f"profile does not cover detector {detector_id}") from None

    def __str__(self) -> str:
        return pretty_print_profile(self)


def characterize_thresholds(
    detector: DetectorModel,
    power_grid: Sequence[float],
    trials: int,
    rng: np.random.Generator,
    *,
    p_lo: float = DEFAULT_P_LO,
    p_hi: float = DEFAULT_P_HI,
    blind: bool = True,
) -> ThresholdProfile:
    """Sweeps probe pulses over ``power_grid`` and reads off P_0% and P_100% per sample index.

    The detector is first driven into its blinded condition (unless ``blind`` is false); every trial
    starts from that same prepared state, so the detector's own state is left untouched.

    Raises:
        UnbracketedBandError: the grid holds no always-click power, or, for a linear-mode detector,
            no never-click power below it.
    """
    grid = [float(p) for p in power_grid]
    if not grid:
        raise ValueError("power grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("power grid must be strictly increasing")
    if trials <= 0:
        raise ValueError(f"trials must be positive, got {trials}")
    if not 0.0 <= p_lo < p_hi <= 1.0:
        raise ValueError(f"need 0 <= p_lo < p_hi <= 1, got {p_lo}, {p_hi}")

    prepared = detector.probe_state(blind)
    mode = prepared.mode  # type: ignore[attr-defined]
    linear = mode is DetectorMode.LINEAR or detector.detector_class == "gated"

    points: list[ThresholdPoint] = []
    for index in range(detector.sample_count):
        never: float | None = None
        always: float | None = None
        for power in grid:
            clicks = sum(detector.probe(prepared, power, index, rng, blind) for _ in range(trials))
            fraction = clicks / trials
            if fraction >= p_hi:
                always = power
                break
            if fraction <= p_lo:
                never = power
        if always is None:
            raise UnbracketedBandError(
                detector.detector_id,
                f"no grid power up to {grid[-1]:.3g} W clicks with probability >= {p_hi} "
                f"(sample index {index}, detector mode {mode.value})",
            )
        if never is None:
            if linear:
                raise UnbracketedBandError(
                    detector.detector_id,
                    f"no grid power down to {grid[0]:.3g} W stays below click probability {p_lo} "
                    f"(sample index {index})",
                )
            never = 0.0
        points.append(ThresholdPoint(never, always))

    not_linear = frozenset() if linear else frozenset({detector.detector_id})
    if not_linear:
        logger.warning(
            "%s was characterized in %s mode; single photons click, P_0%% reported as 0",
            detector.detector_id,
            mode.value,
        )
    return ThresholdProfile({detector.detector_id: tuple(points)}, not_linear)
