from __future__ import annotations

from dataclasses import dataclass

from ..optics import Basis
from ..station.bob import ClickOutcome

SLOT_CSV_COLUMNS = (
    "slot",
    "alice_bit",
    "alice_basis",
    "eve_basis",
    "eve_bit",
    "eve_abstain",
    "bob_basis",
    "voa_db",
    "outcome",
    "detector",
    "click_time_ns",
)


@dataclass(frozen=True)
class SlotRecord:
    """Everything that happened in one slot, from Alice's choice to Bob's outcome."""

    slot: int
    alice_bit: int
    alice_basis: Basis
    eve_basis: Basis | None
    eve_bit: int | None
    eve_abstain: bool
    bob_basis: Basis | None
    """Bob's switch setting; None for the passive four-detector receiver."""

    voa_db: float
    outcome: ClickOutcome

    @property
    def eve_present(self) -> bool:
        return self.eve_basis is not None

    def csv_row(self) -> list[str]:
        outcome = self.outcome
        return [
            str(self.slot),
            str(self.alice_bit),
            self.alice_basis.value,
            "" if self.eve_basis is None else self.eve_basis.value,
            "" if self.eve_bit is None else str(self.eve_bit),
            "1" if self.eve_abstain else "0",
            "" if self.bob_basis is None else self.bob_basis.value,
            repr(float(self.voa_db)),
            outcome.kind.value,
            "+".join(outcome.detectors),
            "" if outcome.time_ns is None else repr(float(outcome.time_ns)),
        ]
