import os


def _debug_flag_enabled(flag: str) -> bool:
    flag_value = os.getenv(flag)
    return flag_value is not None and (flag_value == "1" or flag_value.lower() == "true")


LOG_SLOT_DETAIL = _debug_flag_enabled("BLINDSIM_LOG_SLOTS")
"""By default the engine only logs run-level progress. Set this flag to emit one debug line per slot
(outcome, VOA level, bases). Expect very large logs on 10^5-slot runs.
"""

DONT_LOG_EVE_DATA = _debug_flag_enabled("BLINDSIM_DONT_LOG_EVE")
"""Per-slot debug lines include Eve's basis and bit unless this flag is set. Useful when a log is
shared with someone playing Bob's side of an exercise.
"""
