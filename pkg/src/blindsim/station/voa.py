from __future__ import annotations

import math
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator

from ..engine.rng import RngStream

MAX_ATTENUATION_DB = 80.0


class VoaMode(str, Enum):
    FIXED = "fixed"
    IID = "iid"
    FREQUENCY_SCAN = "frequency-scan"


class VoaSchedule(BaseModel):
    """How Bob's secret attenuator picks a level for every slot."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    max_attenuation_db: float = Field(MAX_ATTENUATION_DB, gt=0.0, le=MAX_ATTENUATION_DB)
    mode: VoaMode = VoaMode.FIXED
    fixed_db: float = 0.0
    levels_db: tuple[float, ...] = (0.0, 10.0, 20.0, 30.0)
    """Level set of the iid mode."""

    pattern_db: tuple[float, ...] = (0.0, 10.0, 20.0, 30.0)
    """Repeating pattern of the frequency-scan mode."""

    phase_offset: int | None = Field(None, ge=0)
    """Secret phase of the frequency-scan pattern; drawn from Bob's VOA stream when unset."""

    @field_validator("fixed_db", "levels_db", "pattern_db")
    @classmethod
    def _check_levels(cls, value: float | tuple[float, ...], info: ValidationInfo):
        levels = value if isinstance(value, tuple) else (value,)
        if not levels:
            raise ValueError("at least one attenuation level is needed")
        ceiling = info.data.get("max_attenuation_db", MAX_ATTENUATION_DB)
        for level in levels:
            if not math.isfinite(level) or level < 0:
                raise ValueError(f"attenuation level {level} dB must be finite and >= 0")
            if level > ceiling:
                raise ValueError(f"attenuation level {level:g} dB exceeds the {ceiling:g} dB ceiling")
        return value

    @property
    def active_levels(self) -> tuple[float, ...]:
        """Levels this schedule can emit."""
        if self.mode is VoaMode.FIXED:
            return (self.fixed_db,)
        if self.mode is VoaMode.IID:
            return self.levels_db
        return tuple(dict.fromkeys(self.pattern_db))


def bob_voa_level(
    slot: int,
    schedule: VoaSchedule,
    rng: np.random.Generator | None = None,
    phase_offset: int = 0,
) -> float:
    """The slot's attenuation in dB. Only the iid mode draws from ``rng``."""
    if schedule.mode is VoaMode.FIXED:
        return schedule.fixed_db
    if schedule.mode is VoaMode.IID:
        if rng is None:
            raise ValueError("the iid VOA mode needs Bob's VOA stream")
        return schedule.levels_db[int(rng.integers(len(schedule.levels_db)))]
    pattern = schedule.pattern_db
    return pattern[(slot + phase_offset) % len(pattern)]


class VoaController:
    """Bob's VOA for one run: resolves the secret phase once and logs every level it sets."""

    def __init__(self, schedule: VoaSchedule, stream: RngStream):
        self.schedule = schedule
        self.stream = stream
        if schedule.phase_offset is not None:
            self.phase_offset = schedule.phase_offset
        elif schedule.mode is VoaMode.FREQUENCY_SCAN:
            self.phase_offset = int(stream.for_setup().integers(len(schedule.pattern_db)))
        else:
            self.phase_offset = 0
        self.log: list[float] = []

    def level(self, slot: int, rng: np.random.Generator | None = None) -> float:
        if rng is None and self.schedule.mode is VoaMode.IID:
            rng = self.stream.for_slot(slot)
        level = bob_voa_level(slot, self.schedule, rng, self.phase_offset)
        self.log.append(level)
        return level
