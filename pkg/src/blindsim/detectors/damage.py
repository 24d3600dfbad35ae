from __future__ import annotations

from dataclasses import replace
from typing import TypeVar

from ..logger import logger
from .events import DetectorDamaged, DetectorEvent, DetectorMode, ModeChange
from .params import DetectorParamsBase

StateT = TypeVar("StateT")


def check_damage(
    p_incident: float,
    params: DetectorParamsBase,
    state: StateT,
    time_ns: float = 0.0,
) -> tuple[StateT, list[DetectorEvent]]:
    """Latches the detector dead once the incident power reaches ``damage_power_w``.

    The damage event is emitted only on the transition; a dead detector stays dead.
    """
    if state.mode is DetectorMode.DEAD or p_incident < params.damage_power_w:  # type: ignore[attr-defined]
        return state, []
    logger.warning(
        "detector destroyed at t=%.0f ns by %.3g W (threshold %.3g W)",
        time_ns,
        p_incident,
        params.damage_power_w,
    )
    dead = replace(state, mode=DetectorMode.DEAD)  # type: ignore[type-var]
    return dead, [
        DetectorDamaged(time_ns, p_incident),
        ModeChange(time_ns, DetectorMode.DEAD, "damage"),
    ]
