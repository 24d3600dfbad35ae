from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from ..detectors.characterize import ThresholdProfile
from ..exceptions import BlindsimException, InsufficientDataError
from ..logger import logger
from ..util._pretty_print import pretty_print_verdict
from .controllability import Eq1Result, ThetaValue, eq1_predicate, theta_values
from .hypothesis import HypothesisResult, LegitimateModel, double_click_test, scaling_test
from .settings import MonitorSettings
from .stats import MonitorStats


@dataclass(frozen=True)
class AttackVerdict:
    """Bob's conclusion about one run, with everything it was drawn from."""

    alarm: bool
    alpha: float
    scaling: HypothesisResult
    double_click: HypothesisResult
    damage: bool
    eq1: Eq1Result | None = None
    """Whether Bob's characterized detectors are controllable in principle; None without a profile."""

    theta: tuple[ThetaValue, ...] = ()
    reasons: tuple[str, ...] = field(default_factory=tuple)
    """Which rules raised the alarm."""

    multi_fraction: float | None = None

    def __str__(self) -> str:
        return pretty_print_verdict(self)


def verdict(
    stats: MonitorStats,
    profile: ThresholdProfile | None,
    model: LegitimateModel,
    settings: MonitorSettings | None = None,
    theta_pairs: Iterable[Sequence[str]] | None = None,
) -> AttackVerdict:
    """Runs both runtime tests and combines them with damage and the double-click fraction rule.

    Each test is run at ``alpha / 2``. A test that cannot run for lack of data is reported as not
    applicable rather than failing the verdict.
    """
    settings = settings or MonitorSettings()
    try:
        scaling = scaling_test(stats, model, settings.min_slots_per_level)
    except InsufficientDataError as e:
        scaling = HypothesisResult.inapplicable(e.message)
    double = double_click_test(stats, model)

    reasons = []
    if scaling.rejects(settings.per_test_alpha):
        reasons.append("scaling")
    if double.rejects(settings.per_test_alpha):
        reasons.append("double-click")
    if stats.damaged:
        reasons.append("damage")
    multi_fraction = stats.multi_fraction
    if (
        multi_fraction is not None
        and stats.click_slots >= settings.min_click_slots
        and multi_fraction > settings.max_double_fraction
    ):
        reasons.append("double-fraction")

    eq1: Eq1Result | None = None
    thetas: tuple[ThetaValue, ...] = ()
    if profile is not None:
        eq1 = eq1_predicate(profile)
        try:
            thetas = tuple(theta_values(profile, theta_pairs))
        except BlindsimException as e:
            logger.debug("theta not evaluated: %s", e.message)

    result = AttackVerdict(
        alarm=bool(reasons),
        alpha=settings.alpha,
        scaling=scaling,
        double_click=double,
        damage=stats.damaged,
        eq1=eq1,
        theta=thetas,
        reasons=tuple(reasons),
        multi_fraction=multi_fraction,
    )
    if result.alarm:
        logger.info("monitor alarm: %s", ", ".join(reasons))
    return result
