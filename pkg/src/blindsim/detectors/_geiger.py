"""Click trains of a Geiger-mode detector under steady illumination or dark counts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import UserError
from .events import Click, DetectorEvent, StrayClicks

SATURATION_PHOTONS_PER_NS = 10.0
"""Above this detected flux the detector fires the instant it re-arms."""

MIN_RECOVERY_NS = 1.0

Window = tuple[float, float]


@dataclass
class Firing:
    registered: list[float] = field(default_factory=list)
    stray: int = 0
    first_stray_ns: float | None = None
    last_click_ns: float | None = None

    @property
    def count(self) -> int:
        return len(self.registered) + self.stray

    def add(self, time_ns: float, window: Window | None) -> None:
        if window is None or window[0] <= time_ns < window[1]:
            self.registered.append(time_ns)
        else:
            self.add_stray(time_ns, 1)
        self.last_click_ns = time_ns

    def add_stray(self, time_ns: float, count: int) -> None:
        if count <= 0:
            return
        if self.first_stray_ns is None:
            self.first_stray_ns = time_ns
        self.stray += count

    def events(self) -> list[DetectorEvent]:
        events: list[DetectorEvent] = [Click(t) for t in self.registered]
        if self.stray:
            events.append(StrayClicks(self.first_stray_ns or 0.0, self.stray))
        return events


def fire(
    start_ns: float,
    end_ns: float,
    ready_ns: float,
    rate_hz: float,
    recovery_ns: float,
    rng: np.random.Generator | None,
    window: Window | None,
    max_clicks: int | None = None,
    into: Firing | None = None,
) -> Firing:
    """Clicks in ``[start_ns, end_ns)`` of a detector that is click-capable from ``ready_ns`` on
    and needs ``recovery_ns`` after every click. ``max_clicks`` counts clicks already in ``into``."""
    firing = Firing() if into is None else into
    cursor = max(start_ns, ready_ns)
    if rate_hz <= 0 or cursor >= end_ns:
        return firing
    recovery_ns = max(recovery_ns, MIN_RECOVERY_NS)
    photons_per_ns = rate_hz * 1e-9

    if photons_per_ns >= SATURATION_PHOTONS_PER_NS:
        count = math.ceil((end_ns - cursor) / recovery_ns)
        if max_clicks is not None:
            count = min(count, max_clicks - firing.count)
        _saturated(firing, cursor, recovery_ns, count, window)
        return firing

    if rng is None:
        raise UserError("a random generator is needed to sample photon arrivals")
    while max_clicks is None or firing.count < max_clicks:
        cursor += rng.exponential(1.0 / photons_per_ns)
        if cursor >= end_ns:
            break
        firing.add(cursor, window)
        cursor += recovery_ns
    return firing


def _saturated(firing: Firing, first: float, step: float, count: int, window: Window | None) -> None:
    if count <= 0:
        return
    last = first + (count - 1) * step
    if window is None:
        firing.registered.extend(first + k * step for k in range(count))
        firing.last_click_ns = last
        return
    lo = max(0, math.ceil((window[0] - first) / step))
    hi = min(count - 1, math.ceil((window[1] - first) / step) - 1)
    inside = [first + k * step for k in range(lo, hi + 1)]
    inside = [t for t in inside if window[0] <= t < window[1]]
    firing.registered.extend(inside)
    stray = count - len(inside)
    if stray:
        firing.add_stray(first if not inside or inside[0] > first else last, stray)
    firing.last_click_ns = last
