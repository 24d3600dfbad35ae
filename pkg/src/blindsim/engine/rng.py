"""Counter-based random streams.

Every draw in a run comes from a Philox generator whose 128-bit key is ``(master seed, stream id)``
and whose counter starts at the slot index (third counter word). A slot's draws therefore never
depend on how many values earlier slots, or other streams, consumed.
"""

from __future__ import annotations

import hashlib
from typing import Literal

import numpy as np

StreamId = Literal[
    "alice-bits",
    "alice-basis",
    "eve-basis",
    "bob-basis",
    "bob-voa",
    "detector-noise",
]

STREAM_IDS: tuple[StreamId, ...] = (
    "alice-bits",
    "alice-basis",
    "eve-basis",
    "bob-basis",
    "bob-voa",
    "detector-noise",
)

_UINT64 = (1 << 64) - 1


def _stream_code(stream_id: str) -> int:
    digest = hashlib.blake2b(stream_id.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class RngStream:
    """One labelled pseudo-random stream of a run."""

    def __init__(self, seed: int, stream_id: StreamId):
        if not 0 <= seed <= _UINT64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.stream_id = stream_id
        self._key = (_stream_code(stream_id) << 64) | seed

    def for_slot(self, slot: int) -> np.random.Generator:
        """A fresh generator for the given slot; identical on every call."""
        if slot < 0:
            raise ValueError(f"slot index must be non-negative, got {slot}")
        return np.random.Generator(np.random.Philox(key=self._key, counter=slot << 128))

    def for_setup(self) -> np.random.Generator:
        """A generator for one-off draws made before the first slot (e.g. a secret phase)."""
        return np.random.Generator(np.random.Philox(key=self._key, counter=1 << 192))


class SlotRandomness:
    """Lazily creates the per-slot generators of every stream, at most once per slot."""

    def __init__(self, streams: dict[str, RngStream], slot: int):
        self._streams = streams
        self.slot = slot
        self._generators: dict[str, np.random.Generator] = {}

    def __getitem__(self, stream_id: StreamId) -> np.random.Generator:
        generator = self._generators.get(stream_id)
        if generator is None:
            generator = self._streams[stream_id].for_slot(self.slot)
            self._generators[stream_id] = generator
        return generator


def make_streams(seed: int, overrides: dict[str, int] | None = None) -> dict[str, RngStream]:
    """Builds all streams of a run. ``overrides`` re-keys individual streams with their own seed."""
    overrides = overrides or {}
    return {
        stream_id: RngStream(overrides.get(stream_id, seed), stream_id) for stream_id in STREAM_IDS
    }
