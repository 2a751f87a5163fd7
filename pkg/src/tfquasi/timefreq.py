"""Short-time Fourier transform and cross A-Wigner distributions on Z_N^d.

A phase-space array is a numpy array of shape ``(N,) * 2d`` indexed ``(x, xi)``.
"""

from __future__ import annotations

import numpy as np

from .lattice import MAX_GRID_SIZE, Grid, as_signal
from .qmatrix import as_quant

__all__ = ["stft", "istft", "stft_block", "cross_wigner_A", "phase_grid_shape"]


def phase_grid_shape(grid: Grid) -> tuple[int, ...]:
    return (grid.N,) * (2 * grid.d)


def _window(f, phi):
    f = as_signal(f)
    phi = as_signal(phi)
    if f.shape != phi.shape:
        raise ValueError(f"signal and window live on different grids: {f.shape} vs {phi.shape}")
    if not np.any(phi):
        raise ValueError("window must be nonzero")
    return f, phi, Grid.of(f)


def stft_block(f, phi, xs: np.ndarray) -> np.ndarray:
    """STFT rows for the time positions ``xs`` (shape (d, B)); returns (B,) + (N,)*d.

    Inputs are assumed validated; this is the chunked kernel behind :func:`stft`.
    """
    N, d = f.shape[0], f.ndim
    xs = np.asarray(xs).reshape(d, -1)
    n = np.arange(N)
    flat = np.zeros((xs.shape[1],) + (1,) * d, dtype=np.intp)
    for k in range(d):
        part = ((n[None, :] - xs[k][:, None]) % N) * N ** (d - 1 - k)
        flat = flat + part.reshape((-1,) + (1,) * k + (N,) + (1,) * (d - 1 - k))
    shifted = np.conj(phi.ravel()[flat])
    return np.fft.fftn(f[None] * shifted, axes=tuple(range(1, d + 1)), norm="ortho")


def stft(f, phi) -> np.ndarray:
    """V(x, xi) = N^(-d/2) sum_y f(y) conj(phi(y - x)) exp(-2 pi i <y, xi>/N)."""
    f, phi, grid = _window(f, phi)
    if grid.size**2 > MAX_GRID_SIZE:
        raise ValueError("phase grid too large for a dense STFT; use a chunked norm")
    xs = np.indices(grid.shape).reshape(grid.d, -1)
    return stft_block(f, phi, xs).reshape(phase_grid_shape(grid))


def istft(V, phi) -> np.ndarray:
    """Left inverse of :func:`stft` for the same window."""
    phi = as_signal(phi)
    grid = Grid.of(phi)
    V = np.asarray(V, dtype=complex)
    if V.shape != phase_grid_shape(grid):
        raise ValueError(f"phase array shape {V.shape} does not match window grid {grid.shape}")
    energy = np.vdot(phi, phi).real
    if energy == 0:
        raise ValueError("window must be nonzero")
    d, N = grid.d, grid.N
    g = np.fft.ifftn(V, axes=tuple(range(d, 2 * d)), norm="ortho")
    idx = np.indices(V.shape)
    x, n = idx[:d], idx[d:]
    weighted = phi[tuple((n - x) % N)] * g
    return weighted.sum(axis=tuple(range(d))) / energy


def cross_wigner_A(f1, f2, A) -> np.ndarray:
    """W(x, xi) = N^(-d/2) sum_y f1(x + A y) conj(f2(x - (I - A) y)) exp(-2 pi i <y, xi>/N)."""
    f1 = as_signal(f1)
    f2 = as_signal(f2)
    if f1.shape != f2.shape:
        raise ValueError("f1 and f2 live on different grids")
    grid = Grid.of(f1)
    A = as_quant(A, grid.N, grid.d)
    d, N = grid.d, grid.N
    idx = np.indices(phase_grid_shape(grid))
    x, y = idx[:d], idx[d:]
    plus = (x + A.apply(y)) % N
    minus = (x - A.complement().apply(y)) % N
    H = f1[tuple(plus)] * np.conj(f2[tuple(minus)])
    return np.fft.fftn(H, axes=tuple(range(d, 2 * d)), norm="ortho")
