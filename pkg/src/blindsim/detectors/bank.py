from __future__ import annotations

import abc
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any, ClassVar, Generic

import numpy as np
from typing_extensions import TypeVar

from ..engine.clock import SimTime
from ..logger import logger
from ..optics import OpticalSegment
from . import _geiger
from .active import ActiveQuenchState, active_step, thermal_step
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
    DetectorParamsBase,
    GatedParams,
    PassiveQuenchParams,
)
from .passive import PassiveQuenchState, passive_step

ParamsT = TypeVar("ParamsT", bound=DetectorParamsBase, default=DetectorParamsBase)
StateT = TypeVar("StateT", default=Any)

_PROBE_AT_NS = 1000


@dataclass
class DetectorLog:
    """Everything a detector did during a run, keyed by slot."""

    clicks: list[tuple[int, float]] = field(default_factory=list)
    """Registered clicks as ``(slot, time_ns)``."""

    mode_changes: list[tuple[int, ModeChange]] = field(default_factory=list)
    damage: tuple[int, DetectorDamaged] | None = None
    stray_clicks: int = 0

    def record(self, slot: int, events: list[DetectorEvent]) -> None:
        for event in events:
            if isinstance(event, Click):
                self.clicks.append((slot, event.time_ns))
            elif isinstance(event, StrayClicks):
                self.stray_clicks += event.count
            elif isinstance(event, ModeChange):
                self.mode_changes.append((slot, event))
            elif isinstance(event, DetectorDamaged) and self.damage is None:
                self.damage = (slot, event)

    def first_mode_change(self, reason: str) -> tuple[int, ModeChange] | None:
        return next((entry for entry in self.mode_changes if entry[1].reason == reason), None)


class DetectorModel(abc.ABC, Generic[ParamsT, StateT]):
    """One detector of Bob's bank: immutable parameters, mutable state, an event log.

    Owned by a single run and stepped only by it.
    """

    detector_class: ClassVar[str]

    def __init__(self, detector_id: str, params: ParamsT):
        self.detector_id = detector_id
        self.params = params
        self.state: StateT = self.initial_state()
        self.log = DetectorLog()

    @abc.abstractmethod
    def initial_state(self, time_ns: float = 0.0) -> StateT:
        pass

    @abc.abstractmethod
    def step_state(
        self,
        state: StateT,
        segment: OpticalSegment,
        rng: np.random.Generator | None,
        window: _geiger.Window | None,
    ) -> tuple[StateT, list[DetectorEvent]]:
        """The pure transition; ``step`` applies it to the owned state."""

    @property
    def mode(self) -> DetectorMode:
        return self.state.mode  # type: ignore[attr-defined]

    @property
    def dead(self) -> bool:
        return self.mode is DetectorMode.DEAD

    def step(
        self,
        segment: OpticalSegment,
        rng: np.random.Generator | None = None,
        window: _geiger.Window | None = None,
        slot: int = 0,
    ) -> list[DetectorEvent]:
        self.state, events = self.step_state(self.state, segment, rng, window)
        if events:
            self.log.record(slot, events)
        return events

    def end_slot(self, slot: int, avg_power_w: float, duration_ns: float) -> list[DetectorEvent]:
        """Slow dynamics evaluated once per slot."""
        return []

    def nominal_profile(self) -> tuple[tuple[float, float], ...] | None:
        """The configured ``(P_0%, P_100%)`` per sample index, or None without a linear band."""
        return None

    @property
    def sample_count(self) -> int:
        return 1

    def probe_state(self, blind: bool) -> StateT:
        """State from which characterization pulses are fired."""
        return self.initial_state()

    def probe_segments(self, power_w: float, index: int, blind: bool) -> list[OpticalSegment]:
        """Light delivering one characterization pulse of ``power_w`` after ``probe_state``."""
        return [_segment(_PROBE_AT_NS, 1, power_w + self.blinding_power_w(blind))]

    def blinding_power_w(self, blind: bool) -> float:
        return 0.0

    def probe(self, state: StateT, power_w: float, index: int, rng: np.random.Generator, blind: bool) -> bool:
        """Whether one characterization pulse clicks; ``state`` is not modified."""
        for segment in self.probe_segments(power_w, index, blind):
            state, events = self.step_state(state, segment, rng, None)
            if any(isinstance(e, Click) for e in events):
                return True
        return False

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.detector_id!r}, mode={self.mode.value})"


class PassiveQuenchDetector(DetectorModel[PassiveQuenchParams, PassiveQuenchState]):
    detector_class = "passive"

    def initial_state(self, time_ns: float = 0.0) -> PassiveQuenchState:
        return PassiveQuenchState.armed(self.params, time_ns)

    def step_state(self, state, segment, rng, window):
        return passive_step(state, self.params, segment, rng, window)

    def blinding_power_w(self, blind: bool) -> float:
        return 2.0 * self.params.hold_power_w if blind else 0.0

    def probe_state(self, blind: bool) -> PassiveQuenchState:
        state = self.initial_state()
        if blind:
            carrier = _segment(0, _PROBE_AT_NS, self.blinding_power_w(True))
            state, _ = self.step_state(state, carrier, None, None)
        return state


class ActiveQuenchDetector(DetectorModel[ActiveQuenchParams, ActiveQuenchState]):
    detector_class = "active"

    def initial_state(self, time_ns: float = 0.0) -> ActiveQuenchState:
        return ActiveQuenchState.initial(self.params, time_ns)

    def step_state(self, state, segment, rng, window):
        return active_step(state, self.params, segment, rng, window)

    def end_slot(self, slot: int, avg_power_w: float, duration_ns: float) -> list[DetectorEvent]:
        before = self.state
        self.state = thermal_step(before, avg_power_w, duration_ns, self.params)
        events: list[DetectorEvent] = []
        was_hot = before.thermally_blinded(self.params)
        hot = self.state.thermally_blinded(self.params)
        if hot != was_hot and self.state.mode is not DetectorMode.DEAD:
            reason = "thermal" if hot else "recovered"
            mode = DetectorMode.LINEAR if hot else self.state.mode
            events.append(ModeChange(float(before.last_event_ns), mode, reason))
            if reason == "thermal":
                logger.info(
                    "%s thermally blinded in slot %d at T=%.2f K",
                    self.detector_id,
                    slot,
                    self.state.temperature_k,
                )
            self.log.record(slot, events)
        return events

    def nominal_profile(self) -> tuple[tuple[float, float], ...]:
        return (self.params.band,)

    def blinding_power_w(self, blind: bool) -> float:
        return 2.0 * self.params.blinding_power_w() if blind else 0.0

    def probe_state(self, blind: bool) -> ActiveQuenchState:
        state = self.initial_state()
        if blind:
            carrier = _segment(0, _PROBE_AT_NS, self.blinding_power_w(True))
            state, _ = self.step_state(state, carrier, None, None)
        return state


class GatedDetector(ActiveQuenchDetector):
    """Gated detector; its characterization samples the after-gate window nanosecond by nanosecond."""

    detector_class = "gated"
    params: GatedParams

    def __init__(self, detector_id: str, params: GatedParams):
        self.clock = gate_clock(params)
        super().__init__(detector_id, params)

    def initial_state(self, time_ns: float = 0.0) -> GatedState:
        return GatedState.initial(self.params, time_ns)  # type: ignore[return-value]

    def step_state(self, state, segment, rng, window):
        return gated_step(state, self.params, segment, self.clock, rng, window)

    def nominal_profile(self) -> tuple[tuple[float, float], ...]:
        return tuple(self.params.after_gate_band(i) for i in range(self.sample_count))

    @property
    def sample_count(self) -> int:
        return self.params.after_gate_window_ns

    def probe_state(self, blind: bool) -> GatedState:
        return self.initial_state()

    def probe_segments(self, power_w: float, index: int, blind: bool) -> list[OpticalSegment]:
        at = self.clock.gate_end(0) + index
        return [_segment(0, at, 0.0), _segment(at, 1, power_w)]


DETECTOR_CLASSES: dict[str, type[DetectorModel[Any, Any]]] = {
    "passive": PassiveQuenchDetector,
    "active": ActiveQuenchDetector,
    "gated": GatedDetector,
}


def build_detector(detector_class: str, detector_id: str, params: DetectorParamsBase | Mapping[str, Any]):
    """Builds a detector of the named class; ``params`` may be a raw mapping."""
    try:
        cls = DETECTOR_CLASSES[detector_class]
    except KeyError:
        raise ValueError(f"unknown detector class {detector_class!r}") from None
    if not isinstance(params, DetectorParamsBase):
        params = PARAMS_BY_CLASS[detector_class](**params)
    return cls(detector_id, params)


def _segment(start_ns: int, duration_ns: int, power_w: float) -> OpticalSegment:
    return OpticalSegment(
        start=SimTime(start_ns), duration=SimTime(duration_ns), power=power_w, dop=0.0
    )
