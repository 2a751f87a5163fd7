"""Moderate and submultiplicative weights on Z_N^dim with computed moderateness certificates."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .lattice import rep_norm
from .qmatrix import as_quant

__all__ = [
    "Weight",
    "ModerateCertificate",
    "standard_weight",
    "as_weight",
    "moderateness_constant",
    "submultiplicativity_check",
    "shifted_weight",
    "weight_transform_A",
    "omega0_compatibility",
    "kernel_weight_compatibility",
    "tensor_weight",
]

EXHAUSTIVE_LIMIT = 2**16
DEFAULT_SAMPLES = 10**6


@dataclass(frozen=True, eq=False)
class Weight:
    """A positive array on Z_N^dim.

    ``kind`` and ``param`` only record provenance; the values are authoritative.
    """

    values: np.ndarray
    kind: str = "custom"
    param: Optional[float] = None

    def __post_init__(self):
        w = np.array(self.values, dtype=float)
        if w.ndim == 0 or len(set(w.shape)) != 1:
            raise ValueError(f"weight shape {w.shape} is not (N,)*dim")
        if not np.all(np.isfinite(w)) or np.any(w <= 0) or not np.all(np.isfinite(1 / w)):
            raise ValueError("weight values must be positive and finite with finite reciprocal")
        w.setflags(write=False)
        object.__setattr__(self, "values", w)

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.ndim

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


@dataclass
class ModerateCertificate:
    """Smallest C with the stated weight inequality on the searched set, plus its witness."""

    constant: float
    witness: tuple
    exhaustive: bool
    samples: int
    seed: Optional[int] = None
    even: Optional[bool] = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "constant": self.constant,
            "witness": [list(map(int, w)) for w in self.witness],
            "exhaustive": self.exhaustive,
            "samples": self.samples,
            "seed": self.seed,
            "even": self.even,
            **self.extra,
        }


def standard_weight(kind: str, N: int, dim: int = 1, param: float = 0.0) -> Weight:
    """constant, polynomial ``(1+|x|^2)^(s/2)`` or exponential ``exp(r|x|)``.

    ``|x|`` is the Euclidean length of the symmetric representative of x.
    """
    r = rep_norm(N, dim)
    if kind == "constant":
        return Weight(np.ones_like(r), "constant", None)
    if kind == "polynomial":
        return Weight((1 + r**2) ** (param / 2), "polynomial", float(param))
    if kind == "exponential":
        return Weight(np.exp(param * r), "exponential", float(param))
    raise ValueError(f"unknown weight kind {kind!r}")


def as_weight(w, shape: tuple[int, ...]) -> np.ndarray:
    """Values of ``w`` (Weight, array or None meaning 1) checked against ``shape``."""
    if w is None:
        return np.ones(shape)
    w = np.asarray(w.values if isinstance(w, Weight) else w, dtype=float)
    if w.shape != tuple(shape):
        raise ValueError(f"weight shape {w.shape} does not match {tuple(shape)}")
    return w


def _check_pair(omega: Weight, v: Weight):
    if omega.values.shape != v.values.shape:
        raise ValueError("weights live on different grids")


def moderateness_constant(
    omega: Weight,
    v: Weight,
    *,
    exhaustive_limit: int = EXHAUSTIVE_LIMIT,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> ModerateCertificate:
    """C = max_{x,y} omega(x+y) / (omega(x) v(y)), indices mod N.

    Exhaustive when the number of pairs is at most ``exhaustive_limit``;
    otherwise a seeded uniform sample of ``samples`` pairs (a lower estimate).
    """
    _check_pair(omega, v)
    w, vv = omega.values, v.values
    M = w.size
    axes = tuple(range(w.ndim))
    if M * M <= exhaustive_limit:
        best, arg = -np.inf, None
        for y in np.ndindex(w.shape):
            ratio = np.roll(w, tuple(-c for c in y), axis=axes) / (w * vv[y])
            k = int(np.argmax(ratio))
            if ratio.flat[k] > best:
                best, arg = float(ratio.flat[k]), (np.unravel_index(k, w.shape), y)
        return ModerateCertificate(best, arg, True, M * M)

    rng = np.random.Generator(np.random.Philox(seed))
    xs = rng.integers(0, M, size=samples)
    ys = rng.integers(0, M, size=samples)
    xc = np.array(np.unravel_index(xs, w.shape))
    yc = np.array(np.unravel_index(ys, w.shape))
    s = np.ravel_multi_index(tuple((xc + yc) % omega.N), w.shape)
    ratio = w.flat[s] / (w.flat[xs] * vv.flat[ys])
    k = int(np.argmax(ratio))
    witness = (tuple(xc[:, k]), tuple(yc[:, k]))
    return ModerateCertificate(float(ratio[k]), witness, False, samples, seed)


def _reflect(values: np.ndarray) -> np.ndarray:
    axes = tuple(range(values.ndim))
    return np.roll(np.flip(values, axis=axes), 1, axis=axes)


def submultiplicativity_check(v: Weight, **kwargs) -> ModerateCertificate:
    """Evenness flag plus the moderateness constant of v against itself."""
    cert = moderateness_constant(v, v, **kwargs)
    cert.even = bool(np.array_equal(v.values, _reflect(v.values)))
    return cert


def shifted_weight(omega: Weight, X) -> Weight:
    """omega_X(y, eta) = omega(y - x, eta - xi) on the phase grid."""
    x, xi = X
    shift = tuple(np.atleast_1d(x)) + tuple(np.atleast_1d(xi))
    if len(shift) != omega.dim:
        raise ValueError(f"shift of length {len(shift)} for a weight on {omega.dim} axes")
    vals = np.roll(omega.values, tuple(int(s) for s in shift), axis=tuple(range(omega.dim)))
    return Weight(vals, omega.kind, omega.param)


def weight_transform_A(omega: Weight, A) -> Weight:
    """omega_A(x, xi, eta, y) = omega(x + A y, xi + A^T eta, eta, y)."""
    if omega.dim % 4:
        raise ValueError("weight must live on the doubled phase grid (Z_N^d)^4")
    d = omega.dim // 4
    A = as_quant(A, omega.N, d)
    idx = np.indices(omega.values.shape)
    x, xi, eta, y = (idx[k * d:(k + 1) * d] for k in range(4))
    src = np.concatenate([(x + A.apply(y)) % omega.N, (xi + A.T.apply(eta)) % omega.N, eta, y])
    return Weight(omega.values[tuple(src)], "custom", None)


def omega0_compatibility(
    omega1: Weight,
    omega2: Weight,
    omega0: Weight,
    A,
    *,
    exhaustive_limit: int = EXHAUSTIVE_LIMIT,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> ModerateCertificate:
    """Smallest C with
    omega2(x,xi)/omega1(y,eta) <= C omega0(x + A(y-x), eta + A^T(xi-eta), xi-eta, y-x).
    """
    if omega1.values.shape != omega2.values.shape or omega1.dim % 2:
        raise ValueError("omega1 and omega2 must share a phase grid")
    d = omega1.dim // 2
    N = omega1.N
    if omega0.values.shape != (N,) * (4 * d):
        raise ValueError("omega0 must live on the doubled phase grid")
    A = as_quant(A, N, d)
    total = N ** (4 * d)
    if total <= exhaustive_limit:
        idx = np.indices((N,) * (4 * d)).reshape(4 * d, -1)
        exhaustive, count = True, total
    else:
        rng = np.random.Generator(np.random.Philox(seed))
        idx = rng.integers(0, N, size=(4 * d, samples))
        exhaustive, count = False, samples
    x, xi, y, eta = (idx[k * d:(k + 1) * d] for k in range(4))
    lhs = omega2.values[tuple(np.concatenate([x, xi]))] / omega1.values[tuple(np.concatenate([y, eta]))]
    arg = np.concatenate([
        (x + A.apply(y - x)) % N,
        (eta + A.T.apply(xi - eta)) % N,
        (xi - eta) % N,
        (y - x) % N,
    ])
    ratio = lhs / omega0.values[tuple(arg)]
    k = int(np.argmax(ratio))
    witness = (tuple(x[:, k]), tuple(xi[:, k]), tuple(y[:, k]), tuple(eta[:, k]))
    return ModerateCertificate(float(ratio[k]), witness, exhaustive, count, None if exhaustive else seed)


def kernel_weight_compatibility(
    omega1: Weight,
    omega2: Weight,
    omega: Weight,
    *,
    exhaustive_limit: int = EXHAUSTIVE_LIMIT,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> ModerateCertificate:
    """Smallest C with omega2(x,xi)/omega1(y,eta) <= C omega(x, y, xi, -eta).

    omega1 lives on the phase grid of Z_N^d1, omega2 on that of Z_N^d2 and
    omega on that of Z_N^(d2+d1), ordered (x, y, xi, eta).
    """
    d1, d2 = omega1.dim // 2, omega2.dim // 2
    N = omega1.N
    if omega1.dim % 2 or omega2.dim % 2 or omega2.N != N:
        raise ValueError("omega1 and omega2 must be phase-grid weights over the same N")
    if omega.values.shape != (N,) * (2 * (d1 + d2)):
        raise ValueError("omega must live on the phase grid of Z_N^(d2+d1)")
    total = N ** (2 * (d1 + d2))
    if total <= exhaustive_limit:
        idx = np.indices(omega.values.shape).reshape(2 * (d1 + d2), -1)
        exhaustive, count = True, total
    else:
        rng = np.random.Generator(np.random.Philox(seed))
        idx = rng.integers(0, N, size=(2 * (d1 + d2), samples))
        exhaustive, count = False, samples
    x, y = idx[:d2], idx[d2:d2 + d1]
    xi, eta = idx[d2 + d1:2 * d2 + d1], idx[2 * d2 + d1:]
    lhs = omega2.values[tuple(np.concatenate([x, xi]))] / omega1.values[tuple(np.concatenate([y, eta]))]
    rhs = omega.values[tuple(np.concatenate([x, y, xi, (-eta) % N]))]
    ratio = lhs / rhs
    k = int(np.argmax(ratio))
    witness = (tuple(x[:, k]), tuple(y[:, k]), tuple(xi[:, k]), tuple(eta[:, k]))
    return ModerateCertificate(float(ratio[k]), witness, exhaustive, count, None if exhaustive else seed)


def tensor_weight(*weights) -> Weight:
    """v(x1, x2, xi1, xi2) = v1(x1, xi1) v2(x2, xi2) for phase-grid weights on Z_N^1."""
    w1, w2 = (np.asarray(w.values if isinstance(w, Weight) else w, float) for w in weights)
    if w1.ndim != 2 or w2.ndim != 2:
        raise ValueError("tensor_weight expects two phase-grid weights on Z_N")
    vals = np.einsum("ac,bd->abcd", w1, w2)
    return Weight(vals)
