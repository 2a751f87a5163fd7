"""Finite cyclic-group substrate: grids Z_N^d, unitary DFT and time-frequency shifts.

Signals are plain ``numpy`` arrays of shape ``(N,) * d``.  The grid is read off
the shape, so every function in the package accepts ordinary arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

MAX_GRID_SIZE = 2**26
MAX_DIM = 4

__all__ = [
    "Grid",
    "PhasePoint",
    "as_signal",
    "as_point",
    "dft",
    "idft",
    "tf_shift",
    "inner",
    "symmetric_rep",
    "rep_norm",
]


@dataclass(frozen=True)
class Grid:
    """The group Z_N^d."""

    N: int
    d: int = 1

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N!r}")
        if int(self.d) != self.d or not 1 <= self.d <= MAX_DIM:
            raise ValueError(f"d must be an integer in [1, {MAX_DIM}], got {self.d!r}")
        if self.size > MAX_GRID_SIZE:
            raise ValueError(f"grid Z_{self.N}^{self.d} has {self.size} points (> 2^26)")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.d

    @property
    def size(self) -> int:
        return self.N**self.d

    @classmethod
    def of(cls, f: np.ndarray) -> "Grid":
        f = np.asarray(f)
        if f.ndim == 0 or len(set(f.shape)) != 1:
            raise ValueError(f"signal shape {f.shape} is not (N,)*d")
        return cls(f.shape[0], f.ndim)


class PhasePoint(NamedTuple):
    """A point (x, xi) of phase space, both entries reduced mod N."""

    x: tuple[int, ...]
    xi: tuple[int, ...]

    def __neg__(self):
        return PhasePoint(tuple(-v for v in self.x), tuple(-v for v in self.xi))


def as_signal(f, d: int | None = None) -> np.ndarray:
    """Validate ``f`` as a finite complex signal on some Z_N^d."""
    f = np.asarray(f, dtype=complex)
    if d is not None and f.ndim == 1 and d > 1:
        n = round(f.size ** (1.0 / d))
        f = f.reshape((n,) * d)
    Grid.of(f)
    if not np.all(np.isfinite(f)):
        raise ValueError("signal has non-finite entries")
    return f


def _coords(v, d: int) -> tuple[int, ...]:
    if np.ndim(v) == 0:
        if d != 1:
            raise ValueError("scalar coordinate given for d > 1")
        return (int(v),)
    v = tuple(int(c) for c in v)
    if len(v) != d:
        raise ValueError(f"expected {d} coordinates, got {len(v)}")
    return v


def as_point(X, grid: Grid) -> PhasePoint:
    """Coerce ``(x, xi)`` (ints for d=1, tuples otherwise) to a reduced PhasePoint."""
    x, xi = X
    x = tuple(c % grid.N for c in _coords(x, grid.d))
    xi = tuple(c % grid.N for c in _coords(xi, grid.d))
    return PhasePoint(x, xi)


def symmetric_rep(N: int) -> np.ndarray:
    """Representatives of Z_N in [-floor(N/2), ceil(N/2)), indexed by residue."""
    n = np.arange(N)
    return np.where(n < N - N // 2, n, n - N)


def rep_norm(N: int, dim: int) -> np.ndarray:
    """Euclidean length of the symmetric representative on Z_N^dim, shape (N,)*dim."""
    r = symmetric_rep(N).astype(float)
    grids = np.meshgrid(*([r] * dim), indexing="ij")
    return np.sqrt(sum(g**2 for g in grids))


def dft(f) -> np.ndarray:
    """Unitary DFT on Z_N^d, normalised by N^(-d/2)."""
    f = as_signal(f)
    return np.fft.fftn(f, norm="ortho")


def idft(F) -> np.ndarray:
    """Inverse of :func:`dft`."""
    F = as_signal(F)
    return np.fft.ifftn(F, norm="ortho")


def _modulation(grid: Grid, xi: Sequence[int]) -> np.ndarray:
    axes = np.meshgrid(*([np.arange(grid.N)] * grid.d), indexing="ij")
    phase = sum(k * a for k, a in zip(xi, axes))
    return np.exp(2j * np.pi * (phase % grid.N) / grid.N)


def tf_shift(f, X) -> np.ndarray:
    """Apply pi(x, xi): n -> exp(2 pi i <xi, n>/N) f(n - x)."""
    f = as_signal(f)
    grid = Grid.of(f)
    X = as_point(X, grid)
    out = np.roll(f, X.x, axis=tuple(range(grid.d)))
    if any(X.xi):
        out = out * _modulation(grid, X.xi)
    return out


def inner(f, g) -> complex:
    """sum_n f(n) conj(g(n))."""
    f = np.asarray(f)
    g = np.asarray(g)
    if f.shape != g.shape:
        raise ValueError(f"grid mismatch: {f.shape} vs {g.shape}")
    return complex(np.vdot(g, f))
