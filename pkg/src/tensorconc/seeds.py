"""Deterministic seed derivation for reproducible parallel experiments.

Every trial/restart derives its own 64-bit stream seed via ``mix``, so
results are identical at any worker count and independent of execution
order.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(z: int) -> int:
    z &= _MASK64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def mix(seed: int, *indices: int) -> int:
    """Derive a 64-bit sub-seed from a master seed and stream indices."""
    z = seed & _MASK64
    for idx in indices:
        z = _splitmix64((z + (idx + 1) * _GOLDEN) & _MASK64)
    return _splitmix64(z)


def generator(seed: int, *indices: int) -> np.random.Generator:
    """A PCG64 generator keyed by ``mix(seed, *indices)``."""
    return np.random.Generator(np.random.PCG64(mix(seed, *indices) if indices else seed & _MASK64))
