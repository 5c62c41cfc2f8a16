"""Deterministic derivation of independent per-replicate random streams."""
from __future__ import annotations

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    """One SplitMix64 finalizer round; a 64-bit avalanche mix."""
    x = (x + _GOLDEN) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def replicate_key(seed: int, ordinal: int) -> int:
    """Mix (seed, ordinal) into a single 64-bit stream key.

    The key is a pure function of its inputs, so replicate streams can be
    recreated in any order and on any worker without shared state.
    """
    if ordinal < 0:
        raise ValueError("ordinal must be non-negative")
    return _splitmix64((_splitmix64(seed & _MASK64) + ordinal) & _MASK64)


def replicate_rng(seed: int, ordinal: int) -> np.random.Generator:
    """Independent deterministic generator for one replicate ordinal."""
    return np.random.Generator(np.random.PCG64(replicate_key(seed, ordinal)))
