"""Runtime tests Bob runs on his own click statistics.

Both tests compare what the receiver saw against a :class:`LegitimateModel` of an un-attacked link:
click probability per VOA level must follow the single-photon attenuation law, and double clicks
must stay at the rate accidental coincidences explain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.stats import binomtest, chi2

from ..engine.clock import SimTime
from ..exceptions import InsufficientDataError
from ..logger import logger
from ..optics import (
    BB84_ANGLES,
    Basis,
    BasisMechanism,
    OpticalSegment,
    StationTopology,
    attenuation_factor,
)
from .stats import MonitorStats

_TINY = 1e-300
_LOG_M_BOUNDS = (math.log(1e-12), math.log(1e3))


@dataclass(frozen=True)
class HypothesisResult:
    statistic: float | None
    p_value: float | None
    applicable: bool = True
    dof: int | None = None
    note: str | None = None
    """Why the test was not applicable, when it was not."""

    @classmethod
    def inapplicable(cls, note: str) -> HypothesisResult:
        return cls(statistic=None, p_value=None, applicable=False, note=note)

    def rejects(self, alpha: float) -> bool:
        return self.applicable and self.p_value is not None and self.p_value < alpha


@dataclass(frozen=True)
class LegitimateModel:
    """Click statistics of the link with nobody on it."""

    mean_photon_number: float
    """μ' at Bob's input, before his VOA."""

    efficiency: float
    dark_count_per_window: float = 0.0
    """Mean dark counts of one detector inside one registration window."""

    topology: StationTopology = StationTopology()

    @property
    def signal_mean(self) -> float:
        """Mean detected photons per slot at 0 dB, summed over all detectors."""
        return self.mean_photon_number * self.efficiency

    @property
    def dark_mean(self) -> float:
        return len(self.topology.detector_ids) * self.dark_count_per_window

    def click_probability(self, attenuation_db: float, signal_mean: float | None = None) -> float:
        m = self.signal_mean if signal_mean is None else signal_mean
        return -math.expm1(-(m * attenuation_factor(attenuation_db) + self.dark_mean))

    def multi_probability(self, attenuation_db: float) -> float:
        """Probability that two or more detectors click in one slot, averaged over Alice's states
        and (for active basis choice) Bob's bases."""
        return float(np.mean([self._multi(means, attenuation_db) for means in self._detector_means]))

    @cached_property
    def _detector_means(self) -> list[np.ndarray]:
        bob_bases: tuple[Basis | None, ...] = (None,)
        if self.topology.mechanism is BasisMechanism.ACTIVE_TWO_DETECTOR:
            bob_bases = (Basis.RECTILINEAR, Basis.DIAGONAL)
        means = []
        for angle in BB84_ANGLES.values():
            pulse = OpticalSegment(SimTime(0), SimTime(1), 1.0, polarization=angle, quantum=True)
            for bob_basis in bob_bases:
                routed = self.topology.route(pulse, bob_basis)
                means.append(np.array([routed[d] for d in self.topology.detector_ids]))
        return means

    def _multi(self, per_unit: np.ndarray, attenuation_db: float) -> float:
        scale = self.signal_mean * attenuation_factor(attenuation_db)
        silent = np.exp(-(per_unit * scale + self.dark_count_per_window))
        clicks = 1.0 - silent
        none = float(np.prod(silent))
        exactly_one = sum(clicks[i] * none / silent[i] for i in range(len(silent)))
        return max(0.0, 1.0 - none - exactly_one)


def _neg_log_likelihood(
    log_m: float, factors: np.ndarray, slots: np.ndarray, clicks: np.ndarray, dark: float
) -> float:
    x = math.exp(log_m) * factors + dark
    log_p = np.log(np.maximum(-np.expm1(-x), _TINY))
    return float(-(clicks * log_p - (slots - clicks) * x).sum())


def scaling_test(
    stats: MonitorStats, model: LegitimateModel, min_slots_per_level: int = 100
) -> HypothesisResult:
    """Chi-square goodness of fit of per-level click counts against ``1 − exp(−m·10^(−a/10) − d)``.

    ``m`` is fitted by maximum likelihood from the same counts (``levels − 1`` degrees of freedom).
    A run without a single click is tested against the model's own ``m`` with ``levels`` degrees of
    freedom instead, so a silenced receiver is caught.
    """
    levels = sorted(stats.per_level)
    if len(levels) < 2:
        return HypothesisResult.inapplicable("fewer than two distinct VOA levels")
    for level in levels:
        if stats.per_level[level].slots < min_slots_per_level:
            raise InsufficientDataError(
                f"VOA level {level:g} dB has {stats.per_level[level].slots} slot(s), "
                f"need {min_slots_per_level}"
            )

    factors = np.array([attenuation_factor(a) for a in levels])
    slots = np.array([stats.per_level[a].slots for a in levels], dtype=float)
    clicks = np.array([stats.per_level[a].click_slots for a in levels], dtype=float)

    if clicks.sum() == 0:
        m, dof = model.signal_mean, len(levels)
    else:
        fit = minimize_scalar(
            _neg_log_likelihood,
            bounds=_LOG_M_BOUNDS,
            args=(factors, slots, clicks, model.dark_mean),
            method="bounded",
        )
        m, dof = math.exp(fit.x), len(levels) - 1

    p = -np.expm1(-(m * factors + model.dark_mean))
    expected = slots * p
    variance = np.maximum(expected * (1.0 - p), _TINY)
    statistic = float(((clicks - expected) ** 2 / variance).sum())
    p_value = float(chi2.sf(statistic, dof))
    logger.debug("scaling test: m=%.4g X2=%.4g dof=%d p=%.3g", m, statistic, dof, p_value)
    return HypothesisResult(statistic, p_value, dof=dof)


def double_click_test(stats: MonitorStats, model: LegitimateModel) -> HypothesisResult:
    """One-sided binomial test of the double/multi-click count against accidental coincidences."""
    n = stats.slot_count
    if n == 0:
        return HypothesisResult.inapplicable("no slots")
    k = stats.multi_slots
    expected = sum(c.slots * model.multi_probability(a) for a, c in stats.per_level.items()) / n
    if expected <= 0.0:
        p_value = 1.0 if k == 0 else 0.0
    else:
        p_value = float(binomtest(k, n, min(expected, 1.0), alternative="greater").pvalue)
    return HypothesisResult(k / n, p_value)
