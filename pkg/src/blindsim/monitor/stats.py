from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from ..station.sifting import SiftedKey
from .metrics import compute_qber, eve_control_fraction

if TYPE_CHECKING:
    from ..engine.records import SlotRecord


@dataclass(frozen=True)
class LevelCounts:
    slots: int = 0
    click_slots: int = 0
    multi_slots: int = 0
    """Slots with a double or multi click."""

    @property
    def click_fraction(self) -> float:
        return self.click_slots / self.slots if self.slots else 0.0


@dataclass(frozen=True)
class MonitorStats:
    """Counts Bob's monitor works from, plus the simulation-only Eve metric."""

    per_level: Mapping[float, LevelCounts] = field(default_factory=dict)
    detector_clicks: Mapping[str, int] = field(default_factory=dict)
    qber: float | None = None
    eve_control_fraction: float | None = None
    sifted_bits: int = 0
    damage_events: tuple[tuple[str, int], ...] = ()
    """``(detector id, slot)`` of every detector destroyed during the run."""

    @classmethod
    def from_records(
        cls,
        records: Iterable[SlotRecord],
        key: SiftedKey | None = None,
        damage_events: Iterable[tuple[str, int]] = (),
        eve_active: bool = False,
    ) -> MonitorStats:
        slots: Counter[float] = Counter()
        clicks: Counter[float] = Counter()
        multis: Counter[float] = Counter()
        per_detector: Counter[str] = Counter()
        for record in records:
            level = record.voa_db
            slots[level] += 1
            if record.outcome.clicked:
                clicks[level] += 1
                per_detector.update(record.outcome.detectors)
            if record.outcome.is_multi:
                multis[level] += 1
        per_level = {
            level: LevelCounts(slots[level], clicks[level], multis[level]) for level in sorted(slots)
        }
        key = key or SiftedKey()
        return cls(
            per_level=per_level,
            detector_clicks=dict(sorted(per_detector.items())),
            qber=compute_qber(zip(key.alice_bits, key.bob_bits)) if len(key) else None,
            eve_control_fraction=eve_control_fraction(key, eve_active),
            sifted_bits=len(key),
            damage_events=tuple(damage_events),
        )

    @property
    def slot_count(self) -> int:
        return sum(c.slots for c in self.per_level.values())

    @property
    def click_slots(self) -> int:
        return sum(c.click_slots for c in self.per_level.values())

    @property
    def multi_slots(self) -> int:
        return sum(c.multi_slots for c in self.per_level.values())

    @property
    def multi_fraction(self) -> float | None:
        """Double or multi clicks as a fraction of click slots."""
        return self.multi_slots / self.click_slots if self.click_slots else None

    @property
    def damaged(self) -> bool:
        return bool(self.damage_events)
