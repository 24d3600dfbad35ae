from __future__ import annotations

from dataclasses import dataclass

DEFAULT_TICK_NS = 1


@dataclass(frozen=True, order=True)
class SimTime:
    """A point or span on the simulation time base, counted in ticks.

    The tick resolution is fixed for a whole run; mixing resolutions is a programming error.
    """

    ticks: int
    """Number of ticks since the start of the run (or the length of a span)."""

    tick_ns: int = DEFAULT_TICK_NS
    """Length of one tick in nanoseconds."""

    def __post_init__(self) -> None:
        if self.ticks < 0:
            raise ValueError(f"SimTime cannot be negative, got {self.ticks} ticks")
        if self.tick_ns < 1:
            raise ValueError(f"tick resolution must be at least 1 ns, got {self.tick_ns}")

    @classmethod
    def from_ns(cls, ns: int | float, tick_ns: int = DEFAULT_TICK_NS) -> SimTime:
        """Converts a nanosecond value that must be an exact multiple of the tick."""
        ticks, remainder = divmod(ns, tick_ns)
        if remainder != 0:
            raise ValueError(f"{ns} ns is not a multiple of the {tick_ns} ns tick")
        return cls(int(ticks), tick_ns)

    @property
    def ns(self) -> int:
        return self.ticks * self.tick_ns

    def _check(self, other: SimTime) -> None:
        if other.tick_ns != self.tick_ns:
            raise ValueError(f"tick mismatch: {self.tick_ns} ns vs {other.tick_ns} ns")

    def __add__(self, other: SimTime) -> SimTime:
        self._check(other)
        return SimTime(self.ticks + other.ticks, self.tick_ns)

    def __sub__(self, other: SimTime) -> SimTime:
        self._check(other)
        return SimTime(self.ticks - other.ticks, self.tick_ns)


@dataclass(frozen=True)
class GateClock:
    """The gate train of a gated detector, derived from the slot clock (one gate per slot)."""

    period_ns: int
    offset_ns: int
    width_ns: int
    after_gate_window_ns: int

    def gate_index(self, t_ns: float) -> int:
        return int((t_ns - self.offset_ns) // self.period_ns)

    def gate_start(self, index: int) -> int:
        return index * self.period_ns + self.offset_ns

    def gate_end(self, index: int) -> int:
        return self.gate_start(index) + self.width_ns

    def boundaries(self, start_ns: float, end_ns: float) -> list[float]:
        """Gate edges and after-gate window ends strictly inside ``(start_ns, end_ns)``."""
        edges: list[float] = []
        first = self.gate_index(start_ns) - 1
        last = self.gate_index(end_ns) + 1
        for index in range(first, last + 1):
            gate_start = self.gate_start(index)
            for edge in (
                gate_start,
                gate_start + self.width_ns,
                gate_start + self.width_ns + self.after_gate_window_ns,
            ):
                if start_ns < edge < end_ns:
                    edges.append(float(edge))
        return sorted(edges)

    def phase(self, t_ns: float) -> tuple[str, int, float]:
        """Returns ``(phase, gate index, offset after gate end)`` for an instant.

        ``phase`` is one of ``"gate"``, ``"after-gate"`` or ``"idle"``. For times before the gate of
        their own period the previous gate's after-gate window is checked first.
        """
        index = self.gate_index(t_ns)
        for candidate in (index, index - 1):
            start = self.gate_start(candidate)
            end = start + self.width_ns
            if start <= t_ns < end:
                return "gate", candidate, 0.0
            if end <= t_ns < end + self.after_gate_window_ns:
                return "after-gate", candidate, t_ns - end
        return "idle", index, 0.0


@dataclass(frozen=True)
class SlotTiming:
    """Where things happen inside every slot, in nanoseconds from the slot start."""

    tick_ns: int
    period_ns: int
    pulse_offset_ns: int
    window_start_ns: int
    window_end_ns: int
    gate: GateClock | None = None

    def slot_start(self, slot: int) -> SimTime:
        return SimTime.from_ns(slot * self.period_ns, self.tick_ns)

    def slot_end(self, slot: int) -> SimTime:
        return SimTime.from_ns((slot + 1) * self.period_ns, self.tick_ns)

    def pulse_time(self, slot: int) -> SimTime:
        return SimTime.from_ns(slot * self.period_ns + self.pulse_offset_ns, self.tick_ns)

    def window(self, slot: int) -> tuple[float, float]:
        """Absolute registration window ``[start, end)`` of a slot, in ns."""
        base = slot * self.period_ns
        return float(base + self.window_start_ns), float(base + self.window_end_ns)

    def ticks(self, ns: int | float) -> SimTime:
        return SimTime.from_ns(ns, self.tick_ns)
