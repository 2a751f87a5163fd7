"""Pseudo-differential quantizations Op_A on Z_N^d.

Symbols are phase arrays of shape ``(N,) * 2d``; kernels are dense
``N^d x N^d`` matrices acting on flattened signals.
"""

from __future__ import annotations

import numpy as np

from .lattice import Grid, as_signal
from .qmatrix import QuantMatrix, as_quant
from .timefreq import cross_wigner_A

__all__ = [
    "QuantMatrix",
    "kernel_of_symbol",
    "symbol_of_kernel",
    "apply_op",
    "change_quantization",
    "rank_one_symbol",
    "pad_kernel",
    "kernel_as_signal",
    "signal_as_kernel",
]


def _symbol_grid(a) -> tuple[np.ndarray, Grid]:
    a = np.asarray(a, dtype=complex)
    if a.ndim % 2 or a.ndim == 0 or len(set(a.shape)) != 1:
        raise ValueError(f"symbol shape {a.shape} is not (N,)*2d")
    if not np.all(np.isfinite(a)):
        raise ValueError("symbol has non-finite entries")
    return a, Grid(a.shape[0], a.ndim // 2)


def _pairs(grid: Grid, A: QuantMatrix):
    """Index arrays (x, y) with x = m - A(m - n), y = m - n over all (m, n)."""
    d, N = grid.d, grid.N
    idx = np.indices(grid.shape * 2)
    m, n = idx[:d], idx[d:]
    y = (m - n) % N
    x = (m - A.apply(y)) % N
    return x, y


def kernel_of_symbol(a, A) -> np.ndarray:
    """K(m, n) = N^(-d/2) (F_2^{-1} a)(m - A(m - n), m - n)."""
    a, grid = _symbol_grid(a)
    A = as_quant(A, grid.N, grid.d)
    d = grid.d
    b = np.fft.ifftn(a, axes=tuple(range(d, 2 * d)), norm="ortho")
    x, y = _pairs(grid, A)
    K = b[tuple(np.concatenate([x, y]))] * grid.N ** (-d / 2)
    return K.reshape(grid.size, grid.size)


def symbol_of_kernel(K, A, *, d: int | None = None) -> np.ndarray:
    """Inverse of :func:`kernel_of_symbol`."""
    K = np.asarray(K, dtype=complex)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError("kernel must be a square matrix")
    if d is None:
        d = 1 if not isinstance(A, QuantMatrix) else A.d
    N = round(K.shape[0] ** (1 / d))
    grid = Grid(N, d)
    if grid.size != K.shape[0]:
        raise ValueError(f"kernel of size {K.shape[0]} is not N^{d}")
    A = as_quant(A, N, d)
    idx = np.indices(grid.shape * 2)
    x, y = idx[:d], idx[d:]
    m = (x + A.apply(y)) % N
    n = (x - A.complement().apply(y)) % N
    Kg = K.reshape(grid.shape * 2)
    H = Kg[tuple(np.concatenate([m, n]))] * N ** (d / 2)
    return np.fft.fftn(H, axes=tuple(range(d, 2 * d)), norm="ortho")


def apply_op(a, A, f) -> np.ndarray:
    """Op_A(a) f."""
    a, grid = _symbol_grid(a)
    f = as_signal(f)
    if f.shape != grid.shape:
        raise ValueError("signal and symbol live on different grids")
    return (kernel_of_symbol(a, A) @ f.ravel()).reshape(grid.shape)


def change_quantization(a1, A1, A2) -> np.ndarray:
    """a2 with Op_{A2}(a2) = Op_{A1}(a1), computed through the kernel."""
    a1, grid = _symbol_grid(a1)
    A1 = as_quant(A1, grid.N, grid.d)
    A2 = as_quant(A2, grid.N, grid.d)
    if A1 == A2:
        return a1.copy()
    return symbol_of_kernel(kernel_of_symbol(a1, A1), A2, d=grid.d)


def rank_one_symbol(f1, f2, A) -> np.ndarray:
    """Symbol of g -> N^(-d/2) <g, f2> f1 in the A-quantization."""
    return cross_wigner_A(f1, f2, A)


def kernel_as_signal(K, N: int) -> np.ndarray:
    """View a kernel of shape (N^d2, N^d1) as a signal on Z_N^(d2 + d1)."""
    K = np.asarray(K, dtype=complex)
    d2 = round(np.log(K.shape[0]) / np.log(N))
    d1 = round(np.log(K.shape[1]) / np.log(N))
    if N**d2 != K.shape[0] or N**d1 != K.shape[1]:
        raise ValueError(f"kernel shape {K.shape} is not (N^d2, N^d1) for N={N}")
    return K.reshape((N,) * (d1 + d2))


def signal_as_kernel(F, d2: int) -> np.ndarray:
    F = as_signal(F)
    N = F.shape[0]
    return F.reshape(N**d2, -1)


def pad_kernel(K, phi, side: str | None = None) -> np.ndarray:
    """Tensor the smaller variable of K with phi so that the kernel becomes square.

    ``side="col"`` pads the input variable, K0(x, (y, y0)) = K(x, y) phi(y0);
    ``side="row"`` pads the output variable, K0((x, x0), y) = K(x, y) phi(x0).
    By default the smaller side is padded; a square K is returned unchanged.
    For a Hilbert-space comparison the singular values scale by ||phi||_2.
    """
    K = np.asarray(K, dtype=complex)
    phi = as_signal(phi).ravel()
    if not np.any(phi):
        raise ValueError("padding window must be nonzero")
    rows, cols = K.shape
    if side is None:
        if rows == cols:
            return K.copy()
        side = "col" if cols < rows else "row"
    if side == "col":
        if cols * phi.size != rows:
            raise ValueError("padding window does not equalise the kernel dimensions")
        return np.kron(K, phi.reshape(1, -1))
    if side == "row":
        if rows * phi.size != cols:
            raise ValueError("padding window does not equalise the kernel dimensions")
        return np.kron(K, phi.reshape(-1, 1))
    raise ValueError(f"side must be 'row' or 'col', got {side!r}")
