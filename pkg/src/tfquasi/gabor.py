"""Separable Gabor systems on Z_N^d: analysis, synthesis, frame operator, canonical duals."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import NotAFrameError
from .lattice import Grid, as_signal, rep_norm

__all__ = [
    "GaborLattice",
    "GaborSystem",
    "gaussian_window",
    "atoms",
    "analysis",
    "synthesis",
    "frame_operator",
    "frame_bounds",
    "canonical_dual",
    "dual_residual",
    "gabor_matrix",
    "wexler_raz",
]

FRAME_TOL = 1e-10
DUAL_TOL = 1e-8


def gaussian_window(N: int, d: int = 1) -> np.ndarray:
    """Periodised discrete Gaussian exp(-pi |rep(n)|^2 / N)."""
    return np.exp(-np.pi * rep_norm(N, d) ** 2 / N).astype(complex)


@dataclass(frozen=True)
class GaborLattice:
    """Time step ``a`` and frequency step ``b`` on Z_N^d, both dividing N."""

    a: int
    b: int
    N: int
    d: int = 1

    def __post_init__(self):
        Grid(self.N, self.d)
        for name, step in (("a", self.a), ("b", self.b)):
            if step < 1 or self.N % step:
                raise ValueError(f"{name}={step} must be a positive divisor of N={self.N}")

    @property
    def shape(self) -> tuple[int, ...]:
        """Coefficient array shape: (N/a,)*d time indices then (N/b,)*d frequency indices."""
        return (self.N // self.a,) * self.d + (self.N // self.b,) * self.d

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def points(self) -> np.ndarray:
        """Lattice points (x, xi) as an array of shape (size, 2d), in coefficient order."""
        idx = np.indices(self.shape).reshape(2 * self.d, -1).T
        steps = np.array([self.a] * self.d + [self.b] * self.d)
        return idx * steps

    def restrict(self, weight) -> np.ndarray:
        """Values of a phase-grid weight at the lattice points, shaped like coefficients."""
        w = np.asarray(getattr(weight, "values", weight), dtype=float)
        sl = (slice(None, None, self.a),) * self.d + (slice(None, None, self.b),) * self.d
        return w[sl]


def atoms(window, lattice: GaborLattice) -> np.ndarray:
    """Rows pi(lambda) window, flattened, for lambda in coefficient order."""
    phi = as_signal(window)
    if phi.shape != (lattice.N,) * lattice.d:
        raise ValueError("window and lattice live on different grids")
    N, d = lattice.N, lattice.d
    n = np.indices(phi.shape).reshape(d, 1, -1)
    xs = np.indices((N // lattice.a,) * d).reshape(d, -1, 1) * lattice.a
    ks = np.indices((N // lattice.b,) * d).reshape(d, -1, 1) * lattice.b
    translates = phi[tuple(((n - xs) % N).reshape(d, -1))].reshape(xs.shape[1], -1)
    phase = (ks * n).sum(axis=0) % N
    modulations = np.exp(2j * np.pi * phase / N)
    return (translates[:, None, :] * modulations[None, :, :]).reshape(-1, phi.size)


@dataclass
class GaborSystem:
    """A window on a lattice, with lazily computed frame bounds and canonical dual."""

    window: np.ndarray
    lattice: GaborLattice
    tol: float = field(default=FRAME_TOL, repr=False)

    def __post_init__(self):
        self.window = as_signal(self.window)
        if self.window.shape != (self.lattice.N,) * self.lattice.d:
            raise ValueError("window and lattice live on different grids")

    @classmethod
    def gaussian(cls, N: int, a: int, b: int, d: int = 1) -> "GaborSystem":
        return cls(gaussian_window(N, d), GaborLattice(a, b, N, d))

    @cached_property
    def atoms(self) -> np.ndarray:
        return atoms(self.window, self.lattice)

    @cached_property
    def frame_operator(self) -> np.ndarray:
        G = self.atoms
        return G.T @ G.conj()

    @cached_property
    def frame_bounds(self) -> tuple[float, float]:
        ev = np.linalg.eigvalsh(self.frame_operator)
        return max(float(ev[0]), 0.0), float(ev[-1])

    @property
    def is_frame(self) -> bool:
        lo, hi = self.frame_bounds
        return hi > 0 and lo > self.tol * hi

    @cached_property
    def dual(self) -> np.ndarray:
        return canonical_dual(self)

    @cached_property
    def dual_atoms(self) -> np.ndarray:
        return atoms(self.dual, self.lattice)

    def with_window(self, window) -> "GaborSystem":
        return GaborSystem(window, self.lattice, self.tol)


def analysis(f, system: GaborSystem) -> np.ndarray:
    """c(j, k) = <f, pi(ja, kb) window>."""
    f = as_signal(f)
    if f.shape != system.window.shape:
        raise ValueError("signal and system live on different grids")
    return (system.atoms.conj() @ f.ravel()).reshape(system.lattice.shape)


def synthesis(c, system: GaborSystem) -> np.ndarray:
    """sum_{j,k} c(j, k) pi(ja, kb) window."""
    c = np.asarray(c, dtype=complex)
    if c.shape != system.lattice.shape and c.shape != (system.lattice.size,):
        raise ValueError(f"coefficients of shape {c.shape}, lattice needs {system.lattice.shape}")
    return (system.atoms.T @ c.ravel()).reshape(system.window.shape)


def frame_operator(system: GaborSystem) -> np.ndarray:
    return system.frame_operator


def frame_bounds(system: GaborSystem) -> tuple[float, float]:
    return system.frame_bounds


def dual_residual(phi_atoms: np.ndarray, gamma_atoms: np.ndarray) -> float:
    """Largest entry of D_gamma C_phi - Id."""
    R = gamma_atoms.T @ phi_atoms.conj()
    return float(np.abs(R - np.eye(R.shape[0])).max())


def canonical_dual(system: GaborSystem) -> np.ndarray:
    """gamma = S^{-1} window, certified by D_gamma C_phi = Id to 1e-8."""
    if not system.is_frame:
        lo, hi = system.frame_bounds
        raise NotAFrameError(
            "not a Gabor frame; increase redundancy (ab <= N required, oversample) "
            f"[frame bounds {lo:.3e}, {hi:.3e}]"
        )
    S = system.frame_operator
    gamma = np.linalg.solve(S, system.window.ravel())
    res = dual_residual(system.atoms, atoms(gamma.reshape(system.window.shape), system.lattice))
    if res > DUAL_TOL:
        raise NotAFrameError(f"canonical dual failed certification (residual {res:.2e})")
    return gamma.reshape(system.window.shape)


def wexler_raz(system: GaborSystem, gamma=None) -> np.ndarray:
    """<gamma, pi(l N/b, k N/a) window> over the adjoint lattice.

    For a dual pair this equals (a b / N)^d at the origin and vanishes elsewhere.
    """
    gamma = system.dual if gamma is None else as_signal(gamma)
    lat = system.lattice
    adjoint = GaborLattice(lat.N // lat.b, lat.N // lat.a, lat.N, lat.d)
    return (atoms(system.window, adjoint).conj() @ gamma.ravel()).reshape(adjoint.shape)


def _pair_atoms(phi, gamma, lattice: GaborLattice):
    A_phi = atoms(phi, lattice)
    A_gamma = atoms(gamma, lattice)
    res = dual_residual(A_phi, A_gamma)
    if res > DUAL_TOL:
        raise NotAFrameError(f"(phi, gamma) is not a dual pair on this lattice (residual {res:.2e})")
    return A_phi, A_gamma


def gabor_matrix(T, phi, gamma, lattice: GaborLattice, *, domain=None) -> np.ndarray:
    """M(lambda, mu) = <T pi(mu) gamma, pi(lambda) phi>, so that D_gamma M C_phi = T.

    ``T`` is a dense matrix acting on flattened signals.  When T maps between
    different grids pass ``domain=(phi_in, gamma_in, lattice_in)`` for the
    input side; ``(phi, gamma, lattice)`` then describe the output side.
    """
    T = np.asarray(T, dtype=complex)
    out_phi, out_gamma = _pair_atoms(phi, gamma, lattice)
    if domain is None:
        in_phi, in_gamma = out_phi, out_gamma
    else:
        in_phi, in_gamma = _pair_atoms(*domain)
    if T.shape != (out_phi.shape[1], in_phi.shape[1]):
        raise ValueError(f"operator shape {T.shape} does not match the Gabor systems")
    return out_phi.conj() @ T @ in_gamma.T
