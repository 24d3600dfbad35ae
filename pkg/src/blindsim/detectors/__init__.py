from .active import ActiveQuenchState, active_bias, active_step, linear_click, thermal_step
from .bank import (
    DETECTOR_CLASSES,
    ActiveQuenchDetector,
    DetectorLog,
    DetectorModel,
    GatedDetector,
    PassiveQuenchDetector,
    build_detector,
)
from .characterize import ThresholdPoint, ThresholdProfile, characterize_thresholds
from .damage import check_damage
from .events import (
    Click,
    DetectorDamaged,
    DetectorEvent,
    DetectorMode,
    ModeChange,
    StrayClicks,
)
from .gated import GatedState, gate_clock, gated_step
from .params import (
    PARAMS_BY_CLASS,
    ActiveQuenchParams,
    DetectorParams,
    DetectorParamsBase,
    GatedParams,
    PassiveQuenchParams,
)
from .passive import PassiveQuenchState, passive_recharge, passive_step

__all__ = [
    "ActiveQuenchDetector",
    "ActiveQuenchParams",
    "ActiveQuenchState",
    "Click",
    "DETECTOR_CLASSES",
    "DetectorDamaged",
    "DetectorEvent",
    "DetectorLog",
    "DetectorMode",
    "DetectorModel",
    "DetectorParams",
    "DetectorParamsBase",
    "GatedDetector",
    "GatedParams",
    "GatedState",
    "ModeChange",
    "PARAMS_BY_CLASS",
    "PassiveQuenchDetector",
    "PassiveQuenchParams",
    "PassiveQuenchState",
    "StrayClicks",
    "ThresholdPoint",
    "ThresholdProfile",
    "active_bias",
    "active_step",
    "build_detector",
    "characterize_thresholds",
    "check_damage",
    "gate_clock",
    "gated_step",
    "linear_click",
    "passive_recharge",
    "passive_step",
    "thermal_step",
]
