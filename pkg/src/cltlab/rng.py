"""Pinned pseudo-random number generation.

The generator is numpy's PCG64 behind ``np.random.Generator``; the seed is
always explicit (CLI default 0). Parallel or repeated tasks never share a
generator: each task derives ``child_seed(seed, index)``, the splitmix64
finalizer applied to seed XOR index*GOLDEN. Both choices are part of the
package's reproducibility contract and must not change silently.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """splitmix64 finalizer: a fixed 64-bit integer hash."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def child_seed(seed: int, index: int) -> int:
    """Derived seed for task ``index``: mix64(seed XOR index*GOLDEN)."""
    return mix64((seed & _MASK64) ^ ((index * _GOLDEN) & _MASK64))


def make_rng(seed: int) -> np.random.Generator:
    """The pinned generator (PCG64) for a given seed."""
    return np.random.Generator(np.random.PCG64(seed))
