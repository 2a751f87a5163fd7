"""Seed derivation and random ensembles.

Streams come from numpy's counter-based Philox-4x64 generator keyed by a
64-bit seed.  Per-sample seeds are derived from the root seed with SplitMix64
so every member of an ensemble can be regenerated on its own.
"""

from __future__ import annotations

import numpy as np

__all__ = ["splitmix64", "derive_seed", "generator", "complex_gaussian"]

_MASK = (1 << 64) - 1


def splitmix64(state: int) -> int:
    """One SplitMix64 output for the given 64-bit state."""
    z = (state + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(root: int, *ids: int) -> int:
    """Fold integer ids into ``root``: s <- splitmix64(s ^ id) for each id."""
    s = splitmix64(root & _MASK)
    for i in ids:
        s = splitmix64(s ^ (int(i) & _MASK))
    return s


def generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed & _MASK))


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """i.i.d. standard complex Gaussian entries (E|z|^2 = 1)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
