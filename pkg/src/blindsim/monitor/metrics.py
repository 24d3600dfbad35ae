from __future__ import annotations

from collections.abc import Iterable

from ..logger import logger
from ..station.sifting import SiftedKey


def compute_qber(sifted_pairs: Iterable[tuple[int, int]]) -> float | None:
    """Fraction of ``(alice_bit, bob_bit)`` pairs that disagree; None for an empty key."""
    total = errors = 0
    for alice_bit, bob_bit in sifted_pairs:
        total += 1
        errors += alice_bit != bob_bit
    if total == 0:
        logger.warning("sifted key is empty; QBER is undefined")
        return None
    return errors / total


def eve_control_fraction(key: SiftedKey, eve_active: bool = True) -> float | None:
    """Fraction of Bob's sifted bits equal to Eve's resend bit for the slot.

    Only a simulation can compute this. None when there is no Eve or no sifted key.
    """
    if not eve_active or len(key) == 0:
        return None
    controlled = sum(1 for b in key.bits if b.eve_bit is not None and b.eve_bit == b.bob_bit)
    return controlled / len(key)
