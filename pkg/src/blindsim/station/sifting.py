from __future__ import annotations

from dataclasses import dataclass, field

from ..optics import Basis
from .bob import ClickOutcome


@dataclass(frozen=True)
class SiftedBit:
    slot: int
    alice_bit: int
    bob_bit: int
    eve_bit: int | None = None
    """Eve's resend bit for the slot, kept only for simulation-side metrics."""


@dataclass
class SiftedKey:
    bits: list[SiftedBit] = field(default_factory=list)
    discarded_multi: int = 0
    """Slots lost to double or multi clicks."""

    def __len__(self) -> int:
        return len(self.bits)

    @property
    def alice_bits(self) -> list[int]:
        return [b.alice_bit for b in self.bits]

    @property
    def bob_bits(self) -> list[int]:
        return [b.bob_bit for b in self.bits]


def sifted_append(
    key: SiftedKey,
    slot: int,
    alice_bit: int,
    alice_basis: Basis,
    outcome: ClickOutcome,
    eve_bit: int | None = None,
) -> bool:
    """Adds the slot to the key iff the bases match and Bob saw exactly one click."""
    if outcome.is_multi:
        key.discarded_multi += 1
        return False
    if outcome.basis is not alice_basis or outcome.bit is None:
        return False
    key.bits.append(SiftedBit(slot, alice_bit, outcome.bit, eve_bit))
    return True
