"""Hierarchical seed derivation: master -> module -> episode/cell.

Keys may be strings or integers; strings are hashed with CRC32 so the
derivation is stable across interpreter runs (``hash()`` is salted).
"""

import zlib
from typing import Union

import numpy as np


SeedKey = Union[int, str]


def _entropy(key: SeedKey) -> int:
    if isinstance(key, str):
        return zlib.crc32(key.encode("utf-8"))
    if key < 0:
        raise ValueError(f"Seed keys must be non-negative, got {key}")
    return int(key)


def derive_seed(master: int, *keys: SeedKey) -> int:
    """Derive a 63-bit child seed from a master seed and a key path."""
    sequence = np.random.SeedSequence([_entropy(master), *map(_entropy, keys)])
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def derive_rng(master: int, *keys: SeedKey) -> np.random.Generator:
    """Random generator for the given key path."""
    return np.random.default_rng(derive_seed(master, *keys))
