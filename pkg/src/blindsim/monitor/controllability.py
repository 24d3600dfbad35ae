"""Whether an attacker who knows a receiver's threshold bands can control its clicks."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from ..detectors.characterize import ThresholdProfile
from ..exceptions import DegenerateProfileError, IncompleteProfileError
from ..logger import logger


@dataclass(frozen=True)
class Eq1Result:
    canonical: bool
    """``max P_100% < 2·min P_0%`` over every detector and sample index."""

    literal: bool
    """The condition as printed, ``max P_0% < 2·min P_0%``; reported alongside, never used."""

    max_always_click_w: float
    min_never_click_w: float

    def __bool__(self) -> bool:
        return self.canonical


@dataclass(frozen=True)
class ThetaValue:
    pair: tuple[str, str]
    index: int
    value: float
    controllable: bool


def eq1_predicate(profile: ThresholdProfile, detector_ids: Iterable[str] | None = None) -> Eq1Result:
    points = profile.all_points(detector_ids)
    if not points:
        raise IncompleteProfileError("profile covers no detectors")
    max_always = max(p.always_click_w for p in points)
    max_never = max(p.never_click_w for p in points)
    min_never = min(p.never_click_w for p in points)
    result = Eq1Result(
        canonical=max_always < 2.0 * min_never,
        literal=max_never < 2.0 * min_never,
        max_always_click_w=max_always,
        min_never_click_w=min_never,
    )
    if result.canonical != result.literal:
        logger.debug("eq1 readings disagree: canonical=%s literal=%s", result.canonical, result.literal)
    return result


def _pair(profile: ThresholdProfile, pair: Sequence[str] | None) -> tuple[str, str]:
    if pair is None:
        if len(profile.detector_ids) != 2:
            raise IncompleteProfileError(
                f"profile has {len(profile.detector_ids)} detectors; name the monitored pair"
            )
        pair = profile.detector_ids
    if len(pair) != 2:
        raise ValueError(f"a monitored pair has two detectors, got {tuple(pair)}")
    return pair[0], pair[1]


def _bounds(profile: ThresholdProfile, pair: tuple[str, str], t: int) -> tuple[float, float]:
    a, b = profile.at(pair[0], t), profile.at(pair[1], t)
    return min(a.never_click_w, b.never_click_w), max(a.always_click_w, b.always_click_w)


def theta(profile: ThresholdProfile, t: int = 0, pair: Sequence[str] | None = None) -> float:
    """``min(P_0%) / max(P_100%)`` over the monitored pair at sample index ``t``; controllable iff
    strictly above 0.5."""
    lowest_never, highest_always = _bounds(profile, _pair(profile, pair), t)
    if highest_always <= 0:
        raise DegenerateProfileError(f"P_100% is zero at sample index {t}; theta is undefined")
    return lowest_never / highest_always


def theta_controllable(profile: ThresholdProfile, t: int = 0, pair: Sequence[str] | None = None) -> bool:
    lowest_never, highest_always = _bounds(profile, _pair(profile, pair), t)
    return 2.0 * lowest_never > highest_always


def theta_values(
    profile: ThresholdProfile, pairs: Iterable[Sequence[str]] | None = None
) -> list[ThetaValue]:
    """Θ_t for every monitored pair and every sample index both detectors share."""
    chosen = [_pair(profile, p) for p in pairs] if pairs is not None else [_pair(profile, None)]
    values = []
    for pair in chosen:
        shared = min(profile.sample_count(pair[0]), profile.sample_count(pair[1]))
        for t in range(shared):
            values.append(
                ThetaValue(pair, t, theta(profile, t, pair), theta_controllable(profile, t, pair))
            )
    return values
