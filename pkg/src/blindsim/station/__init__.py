from .alice import AliceParams, alice_emit
from .bob import BobReceiver, ClickOutcome, OutcomeKind, classify_outcome
from .sifting import SiftedBit, SiftedKey, sifted_append
from .voa import MAX_ATTENUATION_DB, VoaController, VoaMode, VoaSchedule, bob_voa_level

__all__ = [
    "AliceParams",
    "BobReceiver",
    "ClickOutcome",
    "MAX_ATTENUATION_DB",
    "OutcomeKind",
    "SiftedBit",
    "SiftedKey",
    "VoaController",
    "VoaMode",
    "VoaSchedule",
    "alice_emit",
    "bob_voa_level",
    "classify_outcome",
    "sifted_append",
]
