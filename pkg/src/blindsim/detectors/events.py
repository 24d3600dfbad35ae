from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Literal, Union


class DetectorMode(str, Enum):
    GEIGER = "geiger"
    LINEAR = "linear"
    DEAD = "dead"


ModeChangeReason = Literal["bias-sag", "thermal", "recovered", "damage"]


@dataclass(frozen=True)
class Click:
    """A click inside the registration window of its slot."""

    time_ns: float


@dataclass(frozen=True)
class StrayClicks:
    """Clicks that changed the detector state but fell outside every registration window."""

    time_ns: float
    """Time of the first of them."""

    count: int


@dataclass(frozen=True)
class ModeChange:
    time_ns: float
    mode: DetectorMode
    reason: ModeChangeReason


@dataclass(frozen=True)
class DetectorDamaged:
    """Emitted once, when the incident power first reaches the damage threshold."""

    time_ns: float
    power_w: float


DetectorEvent = Union[Click, StrayClicks, ModeChange, DetectorDamaged]

