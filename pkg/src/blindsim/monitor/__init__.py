from .controllability import (
    Eq1Result,
    ThetaValue,
    eq1_predicate,
    theta,
    theta_controllable,
    theta_values,
)
from .hypothesis import HypothesisResult, LegitimateModel, double_click_test, scaling_test
from .metrics import compute_qber, eve_control_fraction
from .settings import MonitorSettings
from .stats import LevelCounts, MonitorStats
from .verdict import AttackVerdict, verdict

__all__ = [
    "AttackVerdict",
    "Eq1Result",
    "HypothesisResult",
    "LegitimateModel",
    "LevelCounts",
    "MonitorSettings",
    "MonitorStats",
    "ThetaValue",
    "compute_qber",
    "double_click_test",
    "eq1_predicate",
    "eve_control_fraction",
    "scaling_test",
    "theta",
    "theta_controllable",
    "theta_values",
    "verdict",
]
