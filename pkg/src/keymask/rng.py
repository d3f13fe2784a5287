"""Deterministic, splittable random streams.

Masking and bootstrap resampling must produce identical results no matter how
work is scheduled across threads. Each unit of work (a document, a resample)
therefore gets its own counter-based Philox stream keyed by
(global seed, 64-bit hash of the unit's identity); no stream ever depends on
processing order.

Python's builtin hash() is salted per process, so string identities are hashed
with blake2b instead.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF


def stable_hash64(value: str | int) -> int:
    """Map a string or int identity to a stable unsigned 64-bit integer."""
    if isinstance(value, int):
        return value & _MASK64
    digest = hashlib.blake2b(value.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def substream(seed: int, *parts: str | int) -> np.random.Generator:
    """A Generator whose draws depend only on (seed, parts), never on call order.

    Philox is counter-based: the key fixes the stream, successive draws advance
    the counter. Keys are two 64-bit words, so extra parts are folded together.
    """
    key = seed & _MASK64
    folded = 0
    for part in parts:
        # Rotate-and-xor fold keeps distinct part sequences distinct in practice.
        folded = ((folded << 7) | (folded >> 57)) & _MASK64
        folded ^= stable_hash64(part)
    return np.random.Generator(np.random.Philox(key=[key, folded]))
