import logging
import sys

from .attack import (
    EveAttacker,
    EveKnowledge,
    EveSlotAction,
    EveStrategy,
    EveVariant,
    eve_intercept,
    generate_after_gate,
    generate_faked_state_active,
    generate_faked_state_passive,
)
from .detectors import (
    ActiveQuenchDetector,
    ActiveQuenchParams,
    Click,
    DetectorDamaged,
    DetectorMode,
    DetectorModel,
    GatedDetector,
    GatedParams,
    ModeChange,
    PassiveQuenchDetector,
    PassiveQuenchParams,
    ThresholdPoint,
    ThresholdProfile,
    active_step,
    build_detector,
    characterize_thresholds,
    check_damage,
    gated_step,
    passive_recharge,
    passive_step,
    thermal_step,
)
from .engine import RngStream, SimTime, SlotTiming, make_streams
from .engine.config import SWEEPABLE_KEYS, ScenarioConfig, load_config, parse_config
from .engine.records import SlotRecord
from .engine.scenario import ScenarioEngine, ScenarioReport, characterize_bank, run_scenario
from .exceptions import (
    BlindsimException,
    ConfigError,
    DegenerateProfileError,
    IncompleteProfileError,
    InsufficientDataError,
    UnbracketedBandError,
    UserError,
)
from .lifecycle import ProgressHooks, ScenarioHooks
from .monitor import (
    AttackVerdict,
    LegitimateModel,
    MonitorSettings,
    MonitorStats,
    compute_qber,
    double_click_test,
    eq1_predicate,
    eve_control_fraction,
    scaling_test,
    theta,
    verdict,
)
from .optics import (
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
from .station import (
    AliceParams,
    BobReceiver,
    ClickOutcome,
    OutcomeKind,
    SiftedKey,
    VoaMode,
    VoaSchedule,
    alice_emit,
    bob_voa_level,
    sifted_append,
)
from .version import __version__


def enable_verbose_stdout_logging():
    """Enables verbose logging to stdout. This is useful for debugging."""
    logger = logging.getLogger("blindsim")
    logger.setLevel(logging.DEBUG)
    logger.addHandler(logging.StreamHandler(sys.stdout))


__all__ = [
    "ActiveQuenchDetector",
    "ActiveQuenchParams",
    "AliceParams",
    "AttackVerdict",
    "Basis",
    "BasisMechanism",
    "BlindsimException",
    "BobReceiver",
    "Click",
    "ClickOutcome",
    "ConfigError",
    "DegenerateProfileError",
    "DetectorDamaged",
    "DetectorMode",
    "DetectorModel",
    "EveAttacker",
    "EveKnowledge",
    "EveSlotAction",
    "EveStrategy",
    "EveVariant",
    "GatedDetector",
    "GatedParams",
    "IncompleteProfileError",
    "InsufficientDataError",
    "LegitimateModel",
    "ModeChange",
    "MonitorSettings",
    "MonitorStats",
    "OpticalSegment",
    "OutcomeKind",
    "PassiveQuenchDetector",
    "PassiveQuenchParams",
    "ProgressHooks",
    "RngStream",
    "SWEEPABLE_KEYS",
    "ScenarioConfig",
    "ScenarioEngine",
    "ScenarioHooks",
    "ScenarioReport",
    "SiftedKey",
    "SimTime",
    "SlotRecord",
    "SlotTiming",
    "StationTopology",
    "ThresholdPoint",
    "ThresholdProfile",
    "UnbracketedBandError",
    "UserError",
    "VoaMode",
    "VoaSchedule",
    "Waveform",
    "__version__",
    "active_step",
    "alice_emit",
    "apply_attenuation",
    "bob_voa_level",
    "build_detector",
    "characterize_bank",
    "characterize_thresholds",
    "check_damage",
    "compute_qber",
    "double_click_test",
    "enable_verbose_stdout_logging",
    "eq1_predicate",
    "eve_control_fraction",
    "eve_intercept",
    "gated_step",
    "generate_after_gate",
    "generate_faked_state_active",
    "generate_faked_state_passive",
    "load_config",
    "make_streams",
    "parse_config",
    "passive_recharge",
    "passive_step",
    "project_onto_basis",
    "run_scenario",
    "sample_photocount",
    "scaling_test",
    "sifted_append",
    "split_passive",
    "theta",
    "thermal_step",
    "verdict",
]
