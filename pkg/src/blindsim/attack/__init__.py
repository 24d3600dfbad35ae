from .attacker import EveAttacker
from .faked_state import (
    EveKnowledge,
    apply_power_compensation,
    blinding_pulse_train,
    control_interval,
    fake_power,
    generate_after_gate,
    generate_faked_state_active,
    generate_faked_state_passive,
)
from .intercept import eve_intercept
from .strategy import (
    BLINDING_VARIANTS,
    DETECTOR_CLASSES_BY_VARIANT,
    EveSlotAction,
    EveStrategy,
    EveVariant,
)

__all__ = [
    "BLINDING_VARIANTS",
    "DETECTOR_CLASSES_BY_VARIANT",
    "EveAttacker",
    "EveKnowledge",
    "EveSlotAction",
    "EveStrategy",
    "EveVariant",
    "apply_power_compensation",
    "blinding_pulse_train",
    "control_interval",
    "eve_intercept",
    "fake_power",
    "generate_after_gate",
    "generate_faked_state_active",
    "generate_faked_state_passive",
]
