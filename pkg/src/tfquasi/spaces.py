"""Weighted sequence quasi-norms, modulation quasi-norms and atomic/tensor upper bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from typing import Optional

import numpy as np

from . import rng as _rng
from .errors import ConfigError, NotAFrameError
from .gabor import GaborSystem, gaussian_window
from .lattice import Grid, PhasePoint, as_signal, tf_shift
from .timefreq import stft_block
from .weights import Weight, as_weight

__all__ = [
    "Exponent",
    "ModSpec",
    "MatrixOperator",
    "AtomicRep",
    "merge_atoms",
    "lattice_atoms",
    "shift_atoms",
    "lattice_cost",
    "lp_weighted_norm",
    "mixed_lpq_norm",
    "modnorm",
    "cell_scale",
    "lattice_modnorm",
    "up_matrix_norm",
    "atomic_norm_upper",
    "tensor_norm_upper",
    "embedding_check",
]


@total_ordering
class Exponent:
    """An exponent in (0, inf] stored exactly: a positive Fraction or infinity.

    Floats are rationalised with ``limit_denominator(10**6)``; pass strings
    such as ``"2/3"`` or Fractions when exactness matters.
    """

    __slots__ = ("_value",)

    def __init__(self, value):
        if isinstance(value, Exponent):
            self._value = value._value
            return
        if isinstance(value, str):
            s = value.strip().lower()
            value = math.inf if s in ("inf", "infinity", "∞") else Fraction(s)
        elif isinstance(value, float):
            value = math.inf if math.isinf(value) else Fraction(value).limit_denominator(10**6)
        elif not isinstance(value, Fraction):
            value = Fraction(value)
        if value != math.inf and value <= 0:
            raise ValueError(f"exponent must be positive, got {value}")
        self._value = value

    @property
    def is_inf(self) -> bool:
        return self._value == math.inf

    @property
    def inv(self) -> Fraction:
        """1/p with 1/inf = 0."""
        return Fraction(0) if self.is_inf else 1 / self._value

    @property
    def value(self):
        return self._value

    def conjugate(self) -> "Exponent":
        if self.inv > 1:
            raise ValueError("conjugate exponent only defined for p >= 1")
        return Exponent(math.inf) if self.inv == 1 else Exponent(1 / (1 - self.inv))

    def __float__(self):
        return math.inf if self.is_inf else float(self._value)

    def __eq__(self, other):
        try:
            return self.inv == Exponent(other).inv
        except (TypeError, ValueError):
            return NotImplemented

    def __lt__(self, other):
        return self.inv > Exponent(other).inv

    def __hash__(self):
        return hash(self.inv)

    def __repr__(self):
        return "Exponent(inf)" if self.is_inf else f"Exponent({self._value})"

    def __str__(self):
        return "inf" if self.is_inf else str(self._value)


def _p(p) -> float:
    return float(Exponent(p))


def lp_weighted_norm(c, p, omega=None) -> float:
    """(sum |c omega|^p)^(1/p), or sup |c omega| for p = inf."""
    c = np.asarray(c)
    a = np.abs(c) * as_weight(omega, c.shape)
    p = _p(p)
    if a.size == 0:
        return 0.0
    if math.isinf(p):
        return float(a.max())
    return float(np.sum(a**p) ** (1 / p))


def _inner_outer(inner_sums: np.ndarray, p: float, q: float) -> float:
    """Finish a mixed norm from per-frequency inner accumulations."""
    inner = inner_sums if math.isinf(p) else inner_sums ** (1 / p)
    if math.isinf(q):
        return float(inner.max())
    return float(np.sum(inner**q) ** (1 / q))


def _accumulate(a: np.ndarray, p: float, axes) -> np.ndarray:
    return a.max(axis=axes) if math.isinf(p) else np.sum(a**p, axis=axes)


def mixed_lpq_norm(V, p, q, omega=None) -> float:
    """Inner l^p over the time axes (first half), outer l^q over the frequency axes."""
    V = np.asarray(V)
    if V.ndim % 2:
        raise ValueError("phase array must have an even number of axes")
    d = V.ndim // 2
    a = np.abs(V) * as_weight(omega, V.shape)
    p, q = _p(p), _p(q)
    return _inner_outer(_accumulate(a, p, tuple(range(d))), p, q)


@dataclass
class ModSpec:
    """Exponents, phase-grid weight and window defining an M^{p,q}_(omega) quasi-norm."""

    p: Exponent
    q: Optional[Exponent] = None
    weight: Optional[Weight] = None
    window: Optional[np.ndarray] = None

    def __post_init__(self):
        self.p = Exponent(self.p)
        self.q = self.p if self.q is None else Exponent(self.q)
        if self.window is not None:
            self.window = as_signal(self.window)
            if not np.any(self.window):
                raise ValueError("window must be nonzero")

    def window_for(self, grid: Grid) -> np.ndarray:
        if self.window is None:
            return gaussian_window(grid.N, grid.d)
        if self.window.shape != grid.shape:
            raise ValueError("window grid does not match the signal grid")
        return self.window

    def with_weight(self, weight) -> "ModSpec":
        return ModSpec(self.p, self.q, weight, self.window)


_CHUNK = 2**20


def modnorm(f, spec: ModSpec) -> float:
    """Mixed l^{p,q} norm of the weighted STFT of f.

    The STFT is evaluated in blocks of time positions, so signals whose phase
    grid does not fit in memory (e.g. kernels on Z_N^3) are still admissible.
    """
    f = as_signal(f)
    grid = Grid.of(f)
    phi = spec.window_for(grid)
    wshape = (grid.N,) * (2 * grid.d)
    w = as_weight(spec.weight, wshape).reshape(grid.size, *grid.shape)
    p, q = float(spec.p), float(spec.q)
    xs = np.indices(grid.shape).reshape(grid.d, -1)
    step = max(1, _CHUNK // grid.size)
    acc = None
    for start in range(0, grid.size, step):
        block = np.abs(stft_block(f, phi, xs[:, start:start + step])) * w[start:start + step]
        part = _accumulate(block, p, 0)
        if acc is None:
            acc = part
        else:
            acc = np.maximum(acc, part) if math.isinf(p) else acc + part
    return _inner_outer(acc, p, q)


def cell_scale(N: int, d: int, p, q=None) -> float:
    """N^(-d(1/p + 1/q)/2).

    With grid spacing N^(-1/2) in time and frequency (the scale of the
    default Gaussian window) the STFT values approximate the continuous
    transform, and ``cell_scale * modnorm`` is the matching Riemann sum.
    Lattice coefficients against the canonical dual need no such factor.
    """
    q = p if q is None else q
    return float(N) ** (-d * (float(Exponent(p).inv) + float(Exponent(q).inv)) / 2)


def lattice_modnorm(f, system: GaborSystem, p, q=None, omega=None) -> float:
    """Weighted mixed norm of the dual-window lattice coefficients <f, pi(lambda) gamma>."""
    q = p if q is None else q
    f = as_signal(f)
    if f.shape != system.window.shape:
        raise ValueError("signal and system live on different grids")
    c = (system.dual_atoms.conj() @ f.ravel()).reshape(system.lattice.shape)
    w = None if omega is None else system.lattice.restrict(omega)
    return mixed_lpq_norm(c, p, q, w)


@dataclass
class MatrixOperator:
    """A complex J2 x J1 matrix with input weight omega1, output weight omega2 and entry weight omega."""

    entries: np.ndarray
    omega1: Optional[np.ndarray] = None
    omega2: Optional[np.ndarray] = None
    omega: Optional[np.ndarray] = None

    def __post_init__(self):
        self.entries = np.atleast_2d(np.asarray(self.entries, dtype=complex))
        if self.entries.ndim != 2:
            raise ValueError("matrix entries must be two-dimensional")
        J2, J1 = self.entries.shape
        self.omega1 = as_weight(self.omega1, (J1,)).ravel()
        self.omega2 = as_weight(self.omega2, (J2,)).ravel()
        if self.omega is not None:
            self.omega = as_weight(self.omega, (J2, J1))

    @property
    def shape(self):
        return self.entries.shape

    def ratio_weight(self) -> np.ndarray:
        """omega2(j2) / omega1(j1), the entry weight the elementary estimates produce."""
        return self.omega2[:, None] / self.omega1[None, :]

    def entry_weight(self) -> np.ndarray:
        return self.ratio_weight() if self.omega is None else self.omega

    def with_entries(self, entries) -> "MatrixOperator":
        return MatrixOperator(entries, self.omega1, self.omega2, self.omega)


def up_matrix_norm(A: MatrixOperator, p) -> float:
    """||a omega||_{l^p} over all entries; omega defaults to omega2/omega1."""
    if not isinstance(A, MatrixOperator):
        A = MatrixOperator(A)
    return lp_weighted_norm(A.entries, p, A.entry_weight())


@dataclass
class AtomicRep:
    """f = sum_n coef_n pi(X_n) window + residual, with the price of each candidate expansion.

    ``candidates`` maps a candidate name to its quasi-norm value; every value
    includes the lattice cost of whatever that candidate leaves unexplained,
    so each one is an upper bound for the atomic quasi-norm of f.
    """

    atoms: list
    window: np.ndarray
    residual: np.ndarray
    candidates: dict
    converged: bool
    path: str
    iterations: int = 0

    @property
    def greedy_bound(self) -> float:
        return self.candidates["greedy"]

    @property
    def lattice_bound(self) -> float:
        return self.candidates["lattice"]

    def reconstruct(self) -> np.ndarray:
        out = self.residual.copy()
        for coef, X in self.atoms:
            out = out + coef * tf_shift(self.window, X)
        return out


def merge_atoms(*reps) -> list:
    """Concatenate the atom lists of several representations, adding coefficients of repeated points."""
    merged: dict = {}
    for rep in reps:
        for coef, X in getattr(rep, "atoms", rep):
            key = (tuple(X[0]), tuple(X[1]))
            merged[key] = merged.get(key, 0) + coef
    return [(complex(c), PhasePoint(*k)) for k, c in sorted(merged.items())]


def lattice_cost(g, system: GaborSystem, p, omega=None) -> float:
    """sum |<g, pi(lambda) gamma> omega(lambda)|^p: the p-th power price of the lattice expansion of g."""
    g = as_signal(g)
    c = system.dual_atoms.conj() @ g.ravel()
    w = np.ones(c.size) if omega is None else system.lattice.restrict(omega).ravel()
    return float(np.sum((np.abs(c) * w) ** _p(p)))


def shift_atoms(atom_list, X, N: int) -> list:
    """Atoms of pi(X) applied to an expansion: pi(x, xi) pi(y, eta) = exp(-2 pi i <eta, x>/N) pi(x + y, xi + eta)."""
    x, xi = (np.atleast_1d(np.asarray(c, dtype=np.int64)) for c in X)
    out = []
    for coef, (y, eta) in atom_list:
        y, eta = np.asarray(y), np.asarray(eta)
        phase = np.exp(-2j * np.pi * (int(np.dot(eta, x)) % N) / N)
        out.append((complex(coef * phase), PhasePoint(tuple(int(v) for v in (x + y) % N), tuple(int(v) for v in (xi + eta) % N))))
    return out


def lattice_atoms(f, system: GaborSystem) -> list:
    """The canonical expansion f = sum <f, pi(lambda) gamma> pi(lambda) window as an atom list."""
    f = as_signal(f)
    c = system.dual_atoms.conj() @ f.ravel()
    d = system.lattice.d
    return [
        (complex(ck), PhasePoint(tuple(int(v) for v in pt[:d]), tuple(int(v) for v in pt[d:])))
        for ck, pt in zip(c, system.lattice.points())
    ]


def _full_atoms(psi: np.ndarray) -> np.ndarray:
    from .gabor import GaborLattice, atoms

    grid = Grid.of(psi)
    return atoms(psi, GaborLattice(1, 1, grid.N, grid.d))


def _point(k: int, grid: Grid) -> PhasePoint:
    X = np.unravel_index(k, (grid.N,) * (2 * grid.d))
    return PhasePoint(tuple(int(v) for v in X[: grid.d]), tuple(int(v) for v in X[grid.d:]))


def _greedy_pursuit(f, psi, grid: Grid, max_atoms: int, tol: float):
    """Matching pursuit over every pi(X) psi; ties go to the lowest linear index."""
    energy = float(np.vdot(psi, psi).real)
    residual = f.copy()
    coefs: dict[int, complex] = {}
    use_gram = grid.size**2 <= 1024
    if use_gram:
        full = _full_atoms(psi)
        gram = full.conj() @ full.T
        corr = full.conj() @ f.ravel()
    xs = np.indices(grid.shape).reshape(grid.d, -1)
    scale = grid.size**0.5
    it = 0
    while it < max_atoms and np.linalg.norm(residual) > tol:
        if not use_gram:
            corr = stft_block(residual, psi, xs).ravel() * scale
        k = int(np.argmax(np.abs(corr)))
        a = corr[k] / energy
        if a == 0:
            break
        atom = full[k].reshape(grid.shape) if use_gram else tf_shift(psi, _point(k, grid))
        residual = residual - a * atom
        coefs[k] = coefs.get(k, 0) + a
        if use_gram:
            corr = corr - a * gram[:, k]
        it += 1
    atoms_list = [(complex(c), _point(k, grid)) for k, c in sorted(coefs.items())]
    return atoms_list, residual, it


def atomic_norm_upper(
    f,
    system: GaborSystem,
    p,
    omega=None,
    *,
    max_atoms: Optional[int] = None,
    tol: Optional[float] = None,
    extra=(),
):
    """Upper bound for the atomic quasi-norm inf (sum |a_n omega(X_n)|^p)^(1/p).

    Candidate expansions of f: a matching pursuit over every time-frequency
    shift of ``system.window``, the canonical lattice expansion with
    dual-window coefficients, and any atom lists passed in ``extra`` (for
    instance :func:`merge_atoms` of representations of summands).  Whatever a
    candidate leaves unexplained is priced by its lattice expansion.  The
    smallest price is returned together with the pursuit's
    :class:`AtomicRep`; a pursuit that did not reach ``tol`` is only
    reported, and the bound then comes from the other candidates.
    """
    f = as_signal(f)
    psi = system.window
    if f.shape != psi.shape:
        raise ValueError("signal and atom live on different grids")
    if not system.is_frame:
        raise NotAFrameError("atom window does not generate a Gabor frame on its lattice")
    grid = Grid.of(f)
    pfl = _p(p)
    if pfl > 1:
        raise ConfigError("atomic quasi-norms are defined for p <= 1")
    w = as_weight(omega, (grid.N,) * (2 * grid.d))
    tol = 1e-8 * float(np.linalg.norm(f)) if tol is None else tol
    max_atoms = 4 * grid.size**2 if max_atoms is None else max_atoms

    def lattice_sum(g):
        return lattice_cost(g, system, pfl, w)

    def price(atom_list):
        rest = f.copy()
        total = 0.0
        for coef, X in atom_list:
            rest = rest - coef * tf_shift(psi, X)
            total += (abs(coef) * w[tuple(X[0]) + tuple(X[1])]) ** pfl
        return (total + lattice_sum(rest)) ** (1 / pfl)

    atoms_list, residual, it = _greedy_pursuit(f, psi, grid, max_atoms, tol)
    converged = bool(np.linalg.norm(residual) <= tol)
    greedy_sum = sum((abs(c) * w[tuple(X[0]) + tuple(X[1])]) ** pfl for c, X in atoms_list)
    candidates = {
        "greedy": float((greedy_sum + lattice_sum(residual)) ** (1 / pfl)),
        "lattice": lattice_sum(f) ** (1 / pfl),
    }
    for k, atom_list in enumerate(extra):
        candidates[f"extra{k}"] = price(atom_list)
    eligible = {k: v for k, v in candidates.items() if converged or k != "greedy"}
    path = min(eligible, key=lambda k: (eligible[k], k))
    rep = AtomicRep(atoms_list, psi, residual, candidates, converged, path, it)
    return eligible[path], rep


def tensor_norm_upper(F, p, v1=None, v2=None, *, windows=None) -> float:
    """(sum_j ||f1_j||^p_{M^p(v1)} ||f2_j||^p_{M^p(v2)})^(1/p) over the SVD terms of F."""
    F = as_signal(F)
    if F.ndim != 2:
        raise ValueError("tensor_norm_upper expects F on Z_N^2")
    N = F.shape[0]
    g1, g2 = windows if windows is not None else (gaussian_window(N), gaussian_window(N))
    s1, s2 = ModSpec(p, p, v1, g1), ModSpec(p, p, v2, g2)
    U, s, Vh = np.linalg.svd(F)
    pfl = _p(p)
    if s.size == 0 or s[0] == 0:
        return 0.0
    total = 0.0
    for j in np.nonzero(s > 1e-14 * s[0])[0]:
        total += (modnorm(s[j] * U[:, j], s1) * modnorm(Vh[j], s2)) ** pfl
    return float(total ** (1 / pfl))


def embedding_check(spec1: ModSpec, spec2: ModSpec, ensemble: int, seed: int, grid: Grid | None = None) -> dict:
    """Empirical constant for ||f||_{spec2} <= C ||f||_{spec1}.

    With p1 <= p2, q1 <= q2 and a shared window the counting-measure nesting
    gives C <= max(omega2/omega1), reported as ``bound``.
    """
    if spec1.p > spec2.p or spec1.q > spec2.q:
        raise ConfigError("embedding needs p1 <= p2 and q1 <= q2")
    if grid is None:
        for s in (spec1, spec2, getattr(spec1.weight, "values", None)):
            if isinstance(s, ModSpec) and s.window is not None:
                grid = Grid.of(s.window)
                break
            if isinstance(s, np.ndarray):
                grid = Grid(s.shape[0], s.ndim // 2)
                break
    if grid is None:
        raise ConfigError("cannot infer the grid; pass grid=")
    wshape = (grid.N,) * (2 * grid.d)
    w1 = as_weight(spec1.weight, wshape)
    w2 = as_weight(spec2.weight, wshape)
    c_omega = float(np.max(w2 / w1))
    same_window = np.array_equal(spec1.window_for(grid), spec2.window_for(grid))
    ratios = []
    for k in range(ensemble):
        g = _rng.generator(_rng.derive_seed(seed, k))
        f = _rng.complex_gaussian(g, grid.shape)
        ratios.append(modnorm(f, spec2) / modnorm(f, spec1))
    ratios = np.array(ratios)
    return {
        "op": "embedding_check",
        "params": {
            "p1": str(spec1.p), "q1": str(spec1.q), "p2": str(spec2.p), "q2": str(spec2.q),
            "N": grid.N, "d": grid.d, "same_window": bool(same_window),
        },
        "constants": {"lower": float(ratios.min()), "upper": float(ratios.max())},
        "bound": c_omega,
        "holds": bool(same_window and ratios.max() <= c_omega * (1 + 1e-12)),
        "ensemble": ensemble,
        "seed": seed,
        "witnesses": [{"sample": k, "ratio": float(r)} for k, r in enumerate(ratios)],
    }
