"""Seeded ensemble experiments for the embedding and operator-ideal theorems.

Each experiment draws random inputs at several grid sizes N, computes a
certified numerator (an ideal or space quasi-norm bound) and a denominator (a
modulation quasi-norm), and reports the ratio distribution.  The theorems
assert that some constant bounds these ratios; in the finite model the
falsifiable version is that the maximum ratio does not grow by more than the
configured budget (default 2x) from one N to the next.
"""

from __future__ import annotations

import csv
import hashlib
import itertools
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import __version__
from . import rng as _rng
from .errors import ConfigError, NotAFrameError
from .gabor import GaborSystem, gabor_matrix, gaussian_window
from .lattice import PhasePoint, rep_norm, tf_shift
from .opnorms import SpaceSpec, compose_bound, nuclear_upper, pqr_condition, schatten_upper
from .qmatrix import as_quant
from .quant import kernel_as_signal, kernel_of_symbol, pad_kernel
from .spaces import (
    Exponent,
    MatrixOperator,
    ModSpec,
    atomic_norm_upper,
    cell_scale,
    lattice_atoms,
    lattice_cost,
    lattice_modnorm,
    merge_atoms,
    modnorm,
    shift_atoms,
    tensor_norm_upper,
    up_matrix_norm,
)
from .timefreq import cross_wigner_A
from .weights import (
    Weight,
    kernel_weight_compatibility,
    moderateness_constant,
    omega0_compatibility,
    standard_weight,
)

__all__ = [
    "ExperimentConfig",
    "EXPERIMENTS",
    "run_experiment",
    "write_report",
    "report_hash",
    "exp_schatten_pseudo",
    "exp_nuclear_pseudo",
    "exp_kernels",
    "exp_minimality",
    "exp_maximality",
    "equivalence_constants",
]

POLICY = "artifact policy: max ratio may grow by less than `budget` between consecutive N"
CSV_HEADER = ["sample", "numerator", "denominator", "ratio"]

_KNOWN_KEYS = {
    "name", "N", "d", "seed", "ensemble", "p", "q", "r", "weights", "lattice", "A",
    "ideal", "d1", "d2", "target", "symbol", "budget", "tolerances", "hypothesis_samples",
}


def _exp(value, name):
    try:
        return Exponent(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad exponent {name}={value!r}: {exc}") from exc


@dataclass
class ExperimentConfig:
    """Parameters of one experiment, validated on construction.

    ``lattice`` is ``{"a": .., "b": ..}``, a mapping from N (as a string) to
    such an object, or for kernels ``{"in": .., "out": ..}`` of either form.
    ``weights`` maps names (omega, omega0, omega1, omega2, v) to shorthand
    weight specs ``"constant"`` or ``{"kind": .., "param": ..}``.
    """

    name: str
    N: list
    seed: int
    ensemble: int = 20
    d: int = 1
    p: str = "1"
    q: Optional[str] = None
    r: Optional[str] = None
    weights: dict = field(default_factory=dict)
    lattice: dict = field(default_factory=lambda: {"a": 2, "b": 2})
    A: str = "0"
    ideal: str = "schatten"
    d1: int = 1
    d2: int = 1
    target: str = "modulation"
    symbol: str = "gaussian"
    budget: float = 2.0
    tolerances: dict = field(default_factory=dict)
    hypothesis_samples: int = 10

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentConfig":
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(obj) - _KNOWN_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key in ("name", "N", "seed"):
            if key not in obj:
                raise ConfigError(f"config is missing {key!r}")
        obj = dict(obj)
        if isinstance(obj["N"], int):
            obj["N"] = [obj["N"]]
        for key in ("p", "q", "r", "A"):
            if key in obj and obj[key] is not None:
                obj[key] = str(obj[key])
        return cls(**obj)

    def __post_init__(self):
        if self.name not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.name!r}; choose from {sorted(EXPERIMENTS)}")
        if not self.N or any(not isinstance(n, int) or n < 2 for n in self.N):
            raise ConfigError("N must be a non-empty list of integers >= 2")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.ensemble < 1:
            raise ConfigError("ensemble must be positive")
        if self.budget <= 1:
            raise ConfigError("budget must exceed 1")
        if self.symbol not in ("gaussian", "rank_one", "zero", "separable"):
            raise ConfigError(f"unknown symbol ensemble {self.symbol!r}")
        self.pe = _exp(self.p, "p")
        self.qe = self.pe if self.q is None else _exp(self.q, "q")
        self.re = self.pe if self.r is None else _exp(self.r, "r")
        for N in self.N:
            self.lattice_for(N)
            self.lattice_for(N, "in")
        EXPERIMENTS[self.name].validate(self)

    def to_dict(self) -> dict:
        out = {k: v for k, v in asdict(self).items()}
        return out

    def lattice_for(self, N: int, side: Optional[str] = None) -> tuple[int, int]:
        spec = self.lattice
        if side is not None and side in spec:
            spec = spec[side]
        elif "in" in spec or "out" in spec:
            spec = spec.get("out", spec.get("in"))
        if str(N) in spec:
            spec = spec[str(N)]
        try:
            a, b = int(spec["a"]), int(spec["b"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"no lattice (a, b) for N={N}: {exc}") from exc
        if a < 1 or b < 1 or N % a or N % b:
            raise ConfigError(f"lattice steps a={a}, b={b} must divide N={N}")
        return a, b

    def weight(self, key: str, N: int, dim: int) -> Weight:
        spec = self.weights.get(key, "constant")
        if isinstance(spec, str):
            spec = {"kind": spec}
        try:
            return standard_weight(spec.get("kind", "constant"), N, dim, float(spec.get("param", 0.0) or 0.0))
        except ValueError as exc:
            raise ConfigError(f"weight {key}: {exc}") from exc

    def tol(self, key: str, default: float) -> float:
        return float(self.tolerances.get(key, default))


@dataclass
class Experiment:
    """prepare(cfg, N) -> context; sample(cfg, ctx, rng, k) -> row dict or None (skipped)."""

    prepare: Callable
    sample: Callable
    validate: Callable = lambda cfg: None
    finalize: Callable = lambda cfg, runs: {}


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("TFQ_THREADS", "1")))
    except ValueError:
        return 1


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def report_hash(report: dict) -> str:
    body = {k: v for k, v in report.items() if k not in ("wall_time", "determinism_hash")}
    return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()


def _config_hash(cfg: ExperimentConfig) -> str:
    return hashlib.sha256(json.dumps(_clean(cfg.to_dict()), sort_keys=True).encode()).hexdigest()


def run_experiment(cfg, *, threads: Optional[int] = None) -> dict:
    """Run every N of the config and assemble the report."""
    if isinstance(cfg, dict):
        cfg = ExperimentConfig.from_dict(cfg)
    exp = EXPERIMENTS[cfg.name]
    start = time.perf_counter()
    workers = threads or _threads()
    runs = []
    for N in cfg.N:
        ctx = exp.prepare(cfg, N)

        def one(k, N=N, ctx=ctx):
            rng = _rng.generator(_rng.derive_seed(cfg.seed, N, k))
            row = exp.sample(cfg, ctx, rng, k)
            if row is None:
                return {"sample": k, "skipped": True}
            row = {"sample": k, **row}
            den = row["denominator"]
            row["ratio"] = row["numerator"] / den if den > 0 else math.inf
            return row

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(one, range(cfg.ensemble)))
        else:
            rows = [one(k) for k in range(cfg.ensemble)]
        rows.sort(key=lambda r: r["sample"])
        ratios = [r["ratio"] for r in rows if not r.get("skipped")]
        runs.append({
            "N": N,
            "certificates": ctx.get("certificates", {}),
            "hypotheses": ctx.get("hypotheses", {}),
            "rows": rows,
            "max_ratio": max(ratios) if ratios else None,
            "median_ratio": float(np.median(ratios)) if ratios else None,
            "min_ratio": min(ratios) if ratios else None,
            "skipped": sum(1 for r in rows if r.get("skipped")),
        })

    growth = []
    for prev, cur in zip(runs, runs[1:]):
        if prev["max_ratio"] and cur["max_ratio"] is not None:
            growth.append(cur["max_ratio"] / prev["max_ratio"])
    finite = all(r["max_ratio"] is None or math.isfinite(r["max_ratio"]) for r in runs)
    extra = exp.finalize(cfg, runs)
    failed = extra.get("failed_hypotheses", [])
    passed = finite and all(g < cfg.budget for g in growth) and not failed
    passed = passed and any(r["max_ratio"] is not None for r in runs)
    report = {
        "artifact": "tfquasi",
        "version": __version__,
        "experiment": cfg.name,
        "config": cfg.to_dict(),
        "config_hash": _config_hash(cfg),
        "policy": {"budget": cfg.budget, "label": POLICY},
        "runs": runs,
        "growth": growth,
        "pass": bool(passed),
        **extra,
    }
    report = _clean(report)
    report["determinism_hash"] = report_hash(report)
    report["wall_time"] = time.perf_counter() - start
    return report


def write_report(report: dict, out_dir) -> list[Path]:
    """Write ``<experiment>.json`` and one ``<experiment>_N<N>.csv`` per grid size."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    name = report["experiment"]
    paths = [out / f"{name}.json"]
    paths[0].write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    for run in report["runs"]:
        path = out / f"{name}_N{run['N']}.csv"
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for row in run["rows"]:
                if row.get("skipped"):
                    writer.writerow([row["sample"], "", "", ""])
                else:
                    writer.writerow([row["sample"], repr(row["numerator"]), repr(row["denominator"]), repr(row["ratio"])])
        paths.append(path)
    return paths


# ---------------------------------------------------------------- shared pieces


def _system(N: int, d: int, a: int, b: int) -> GaborSystem:
    system = GaborSystem.gaussian(N, a, b, d)
    system.dual  # certify up front; raises NotAFrameError
    return system


def _require_pqr(cfg: ExperimentConfig):
    holds, slack = pqr_condition(cfg.pe, cfg.qe, cfg.re)
    if not holds:
        raise ConfigError(
            f"exponents p={cfg.pe}, q={cfg.qe}, r={cfg.re} violate the pqr condition (slack {slack})"
        )
    return slack


def _zero_frequency(w: Weight, d: int) -> np.ndarray:
    """w restricted to zero frequency: values on the time axes (first d of 2d)."""
    return w.values[(Ellipsis,) + (0,) * d]


def _random_symbol(cfg, rng, N: int, d: int, A, w0: Weight) -> Optional[np.ndarray]:
    shape = (N,) * (2 * d)
    if cfg.symbol == "zero":
        return np.zeros(shape, dtype=complex)
    if cfg.symbol == "rank_one":
        f1 = _rng.complex_gaussian(rng, (N,) * d)
        f2 = _rng.complex_gaussian(rng, (N,) * d)
        return cross_wigner_A(f1, f2, A)
    return _rng.complex_gaussian(rng, shape) / _zero_frequency(w0, 2 * d)


def _ideal_bound(cfg, M, w1, w2):
    frm, to = SpaceSpec.linf(w1), SpaceSpec.lp(cfg.pe, w2)
    if cfg.ideal == "nuclear":
        return nuclear_upper(M, frm, to, cfg.re)
    return schatten_upper(M, frm, to, cfg.qe)


def _factor_residual(M, phi_atoms_out, gamma_atoms_out, phi_atoms_in, K):
    """Relative Frobenius residual of D_gamma M C_phi against K."""
    R = gamma_atoms_out.T @ M @ phi_atoms_in.conj()
    return float(np.linalg.norm(R - K) / max(np.linalg.norm(K), 1e-300))


# ------------------------------------------------------------- pseudo-differential


def _validate_pseudo(cfg: ExperimentConfig):
    if cfg.name == "nuclear":
        if cfg.r is not None and cfg.re != cfg.pe:
            raise ConfigError("the nuclear experiment needs r = p")
        if cfg.pe > 1:
            raise ConfigError(f"nuclear experiment needs p <= 1, got p={cfg.pe}")
        cfg.re = cfg.pe
    else:
        _require_pqr(cfg)


def _prepare_pseudo(cfg: ExperimentConfig, N: int) -> dict:
    d = cfg.d
    a, b = cfg.lattice_for(N)
    system = _system(N, d, a, b)
    A = as_quant(cfg.A, N, d)
    w1, w2 = cfg.weight("omega1", N, 2 * d), cfg.weight("omega2", N, 2 * d)
    w0 = cfg.weight("omega0", N, 4 * d)
    cert = omega0_compatibility(w1, w2, w0, A, seed=cfg.seed)
    ctx = {
        "N": N, "d": d, "A": A, "system": system, "w0": w0,
        "w1": system.lattice.restrict(w1).ravel(), "w2": system.lattice.restrict(w2).ravel(),
        "window": gaussian_window(N, 2 * d),
        "certificates": {"omega0": cert.to_dict(), "frame_bounds": list(system.frame_bounds)},
    }
    if cfg.name == "schatten":
        ctx["certificates"]["pqr_slack"] = str(_require_pqr(cfg))
    else:
        _prepare_nuclear_pieces(cfg, ctx, w1, w2)
    return ctx


def _prepare_nuclear_pieces(cfg, ctx, w1: Weight, w2: Weight):
    """Norms of the synthesis atoms and analysis functionals used to push a
    nuclear decomposition of M forward to one of D_gamma M C_phi."""
    system = ctx["system"]
    phi, gamma = system.window, system.dual
    g = gaussian_window(system.lattice.N, system.lattice.d)
    energy = float(np.vdot(g, g).real)
    inv_w1 = Weight(1 / w1.values)
    synth, funct = [], []
    for pt in system.lattice.points():
        X = PhasePoint(tuple(pt[: ctx["d"]]), tuple(pt[ctx["d"]:]))
        synth.append(modnorm(tf_shift(gamma, X), ModSpec(cfg.pe, cfg.pe, w2, g)))
        funct.append(modnorm(tf_shift(phi, X), ModSpec(1, 1, inv_w1, g)) / energy)
    synth, funct = np.array(synth), np.array(funct)
    ctx["synth_norms"], ctx["funct_norms"] = synth, funct
    ctx["D_norm"] = float(np.max(synth / ctx["w2"]))
    ctx["C_norm"] = float(np.max(funct * ctx["w1"]))
    ctx["certificates"]["synthesis_norm"] = ctx["D_norm"]
    ctx["certificates"]["analysis_norm"] = ctx["C_norm"]


def _sample_pseudo(cfg, ctx, rng, k):
    a = _random_symbol(cfg, rng, ctx["N"], ctx["d"], ctx["A"], ctx["w0"])
    if not np.any(a):
        return None
    system = ctx["system"]
    K = kernel_of_symbol(a, ctx["A"])
    M = gabor_matrix(K, system.window, system.dual, system.lattice)
    residual = _factor_residual(M, system.atoms, system.dual_atoms, system.atoms, K)
    den = modnorm(a, ModSpec(cfg.re, cfg.re, ctx["w0"], ctx["window"]))
    frm, to = SpaceSpec.linf(ctx["w1"]), SpaceSpec.lp(cfg.pe, ctx["w2"])
    row = {"denominator": den, "factor_residual": residual}
    if cfg.name == "schatten":
        num, rep = schatten_upper(M, frm, to, cfg.qe, report=True)
        row["sigma_upper_head"] = [float(s) for s in rep.sigma_upper[:4]]
    else:
        num = nuclear_upper(M, frm, to, cfg.re)
        r = float(cfg.re)
        terms = np.abs(M) * ctx["synth_norms"][:, None] * ctx["funct_norms"][None, :]
        pushed = float(np.sum(terms**r) ** (1 / r))
        product = compose_bound(num, ctx["C_norm"], ctx["D_norm"], "nuclear", composed=pushed)
        row["operator_nuclear_upper"] = pushed
        row["composition_product"] = product
    row["numerator"] = num
    return row


exp_schatten_pseudo = Experiment(_prepare_pseudo, _sample_pseudo, _validate_pseudo)
exp_nuclear_pseudo = Experiment(_prepare_pseudo, _sample_pseudo, _validate_pseudo)


# ------------------------------------------------------------------- kernels


def _validate_kernels(cfg: ExperimentConfig):
    if cfg.ideal not in ("schatten", "nuclear"):
        raise ConfigError(f"ideal must be 'schatten' or 'nuclear', got {cfg.ideal!r}")
    if cfg.ideal == "nuclear":
        if cfg.pe > 1:
            raise ConfigError(f"nuclear kernels need p <= 1, got p={cfg.pe}")
        if cfg.r is not None and cfg.re != cfg.pe:
            raise ConfigError("nuclear kernels need r = p")
        cfg.re = cfg.pe
    else:
        _require_pqr(cfg)
    if cfg.d1 < 1 or cfg.d2 < 1 or cfg.d1 + cfg.d2 > 4:
        raise ConfigError("kernel dimensions need d1, d2 >= 1 and d1 + d2 <= 4")


def _prepare_kernels(cfg: ExperimentConfig, N: int) -> dict:
    d1, d2 = cfg.d1, cfg.d2
    sys_out = _system(N, d2, *cfg.lattice_for(N, "out"))
    sys_in = _system(N, d1, *cfg.lattice_for(N, "in"))
    w1, w2 = cfg.weight("omega1", N, 2 * d1), cfg.weight("omega2", N, 2 * d2)
    w = cfg.weight("omega", N, 2 * (d1 + d2))
    cert = kernel_weight_compatibility(w1, w2, w, seed=cfg.seed)
    ctx = {
        "N": N, "sys_out": sys_out, "sys_in": sys_in, "w": w,
        "w1": sys_in.lattice.restrict(w1).ravel(), "w2": sys_out.lattice.restrict(w2).ravel(),
        "window": gaussian_window(N, d1 + d2),
        "certificates": {"kernel_weight": cert.to_dict()},
    }
    if d1 != d2:
        dpad = abs(d2 - d1)
        ctx["pad"] = gaussian_window(N, dpad)
        ctx["pad_side"] = "col" if d1 < d2 else "row"
        ctx["pad_modnorm"] = N ** (4 * max(d1, d2)) <= 2**24
    return ctx


def _sample_kernels(cfg, ctx, rng, k):
    N, d1, d2 = ctx["N"], cfg.d1, cfg.d2
    shape = (N**d2, N**d1)
    if cfg.symbol == "zero":
        return None
    if cfg.symbol in ("separable", "rank_one"):
        f = _rng.complex_gaussian(rng, shape[0])
        g = _rng.complex_gaussian(rng, shape[1])
        K = np.outer(f, g.conj())
    else:
        scale = _zero_frequency(ctx["w"], d1 + d2).reshape(shape)
        K = _rng.complex_gaussian(rng, shape) / scale
    so, si = ctx["sys_out"], ctx["sys_in"]
    M = gabor_matrix(K, so.window, so.dual, so.lattice, domain=(si.window, si.dual, si.lattice))
    residual = _factor_residual(M, so.atoms, so.dual_atoms, si.atoms, K)
    num = _ideal_bound(cfg, M, ctx["w1"], ctx["w2"])
    den = modnorm(kernel_as_signal(K, N), ModSpec(cfg.re, cfg.re, ctx["w"], ctx["window"]))
    row = {"numerator": num, "denominator": den, "factor_residual": residual}
    if "pad" in ctx:
        K0 = pad_kernel(K, ctx["pad"], ctx["pad_side"])
        s, s0 = (np.linalg.svd(X, compute_uv=False) for X in (K, K0))
        row["pad_sigma_ratio"] = float(s0[0] / s[0])
        row["pad_norm"] = float(np.linalg.norm(ctx["pad"]))
        if ctx["pad_modnorm"]:
            dm = max(d1, d2)
            spec0 = ModSpec(cfg.re, cfg.re, None, gaussian_window(N, 2 * dm))
            spec = ModSpec(cfg.re, cfg.re, None, ctx["window"])
            row["pad_modnorm_ratio"] = modnorm(kernel_as_signal(K0, N), spec0) / modnorm(kernel_as_signal(K, N), spec)
    return row


exp_kernels = Experiment(_prepare_kernels, _sample_kernels, _validate_kernels)


# ------------------------------------------------------- minimality / maximality

SIGNAL_TARGETS = ("modulation", "window", "atomic", "lattice")
MATRIX_TARGETS = ("matrix_nuclear", "matrix_schatten")


def _alt_window(N: int, d: int) -> np.ndarray:
    """A second Gaussian, twice as narrow in time, for window-change targets."""
    return np.exp(-2 * np.pi * rep_norm(N, d) ** 2 / N).astype(complex)


def _signal_target(cfg, ctx, name):
    """Return (norm, extra_for_pairs) for a signal target."""
    p, q, w, system = cfg.pe, cfg.qe, ctx["omega"], ctx["system"]
    if name == "modulation":
        return lambda f, **kw: modnorm(f, ModSpec(p, q, w))
    if name == "window":
        spec = ModSpec(p, q, w, _alt_window(ctx["N"], ctx["d"]))
        return lambda f, **kw: modnorm(f, spec)
    if name == "lattice":
        return lambda f, **kw: lattice_modnorm(f, system, p, q, w)
    if name == "atomic":
        return lambda f, extra=(), **kw: atomic_norm_upper(f, system, p, w, extra=extra)[0]
    raise ConfigError(f"unknown target {name!r}")


def _validate_minimality(cfg: ExperimentConfig):
    if cfg.target not in SIGNAL_TARGETS + MATRIX_TARGETS:
        raise ConfigError(f"unknown minimality target {cfg.target!r}")
    if cfg.target == "atomic" and (cfg.pe > 1 or cfg.qe != cfg.pe):
        raise ConfigError("the atomic target needs p = q <= 1")
    if cfg.target == "matrix_nuclear" and cfg.pe > 1:
        raise ConfigError("the nuclear matrix target needs p <= 1")
    if cfg.target == "matrix_schatten":
        _require_pqr(cfg)


def _p_triangle(norm, pairs, p: float, extra_fn=None) -> dict:
    worst = 0.0
    for f, g in pairs:
        extra = extra_fn(f, g) if extra_fn else ()
        lhs = norm(f + g, extra=extra) ** p
        rhs = norm(f) ** p + norm(g) ** p
        worst = max(worst, lhs / rhs if rhs > 0 else 0.0)
    return {"holds": bool(worst <= 1 + 1e-12), "worst": worst, "pairs": len(pairs)}


def _atomic_pairs(system, p):
    def extra(f, g):
        reps = []
        for h in (f, g):
            _, rep = atomic_norm_upper(h, system, p)
            reps.append([rep.atoms, lattice_atoms(h, system)])
        return [merge_atoms(x, y) for x, y in itertools.product(*reps)]
    return extra


def _prepare_signal_minimality(cfg, N: int, maximal: bool = False) -> dict:
    d = cfg.d
    a, b = cfg.lattice_for(N)
    try:
        system = _system(N, d, a, b)
        frame_ok = True
    except NotAFrameError:
        system, frame_ok = None, False
    omega = cfg.weight("omega", N, 2 * d)
    v = cfg.weight("v", N, 2 * d)
    cert = moderateness_constant(omega, v, seed=cfg.seed)
    ctx = {"N": N, "d": d, "system": system, "omega": omega, "v": v, "c_mod": cert.constant}
    ctx["certificates"] = {"moderateness": cert.to_dict()}
    hyp = {"3_atom": {"holds": frame_ok, "detail": "window generates a Gabor frame with certified dual"}}
    if not frame_ok:
        ctx["hypotheses"] = hyp
        ctx["broken"] = True
        return ctx
    norm = _signal_target(cfg, ctx, cfg.target)
    ctx["norm"] = norm
    hrng = _rng.generator(_rng.derive_seed(cfg.seed, N, 2**32))
    m = cfg.hypothesis_samples
    shape = (N,) * d
    if not maximal:
        pairs = [(_rng.complex_gaussian(hrng, shape), _rng.complex_gaussian(hrng, shape)) for _ in range(m)]
        extra = _atomic_pairs(system, cfg.pe) if cfg.target == "atomic" else None
        pf = float(min(cfg.pe, cfg.qe, Exponent(1)))
        hyp["1_p_triangle"] = _p_triangle(norm, pairs, pf, extra)
    pf = float(min(cfg.pe, cfg.qe, Exponent(1)))
    shift_worst, excess = 0.0, 0.0
    for _ in range(m):
        f = _rng.complex_gaussian(hrng, shape)
        if cfg.target == "lattice":
            pt = system.lattice.points()[int(hrng.integers(system.lattice.size))]
        else:
            pt = hrng.integers(0, N, size=2 * d)
        X = PhasePoint(tuple(int(c) for c in pt[:d]), tuple(int(c) for c in pt[d:]))
        vX = v.values[tuple(int(c) for c in pt)]
        extra, unexplained = (), 0.0
        if cfg.target == "atomic":
            # the shifted expansion of f represents pi(X) f up to the shifted
            # pursuit residual, whose lattice price is added explicitly
            _, rep = atomic_norm_upper(f, system, cfg.pe, omega)
            extra = [shift_atoms(rep.atoms, X, N), shift_atoms(lattice_atoms(f, system), X, N)]
            unexplained = lattice_cost(tf_shift(rep.residual, X), system, cfg.pe, omega)
        lhs, base = norm(tf_shift(f, X), extra=extra), norm(f)
        shift_worst = max(shift_worst, lhs / (vX * base))
        excess = max(excess, lhs**pf / ((ctx["c_mod"] * vX * base) ** pf + unexplained))
    hyp["2_shift"] = {
        "holds": bool(excess <= 1 + 1e-12),
        "empirical": shift_worst,
        "c_mod": ctx["c_mod"],
    }
    atom_norm = norm(system.window)
    hyp["3_atom"]["norm"] = atom_norm
    hyp["3_atom"]["holds"] = bool(0 < atom_norm < math.inf)
    ctx["hypotheses"] = hyp
    return ctx


def _prepare_matrix_minimality(cfg, N: int) -> dict:
    w1 = cfg.weight("omega1", N, 1).values
    w2 = cfg.weight("omega2", N, 1).values
    frm, to = SpaceSpec.linf(w1), SpaceSpec.lp(cfg.pe, w2)
    if cfg.target == "matrix_nuclear":
        def norm(T):
            return nuclear_upper(T, frm, to, cfg.pe)
        ref = cfg.pe
    else:
        def norm(T):
            return schatten_upper(T, frm, to, cfg.qe)
        ref = cfg.re
    ctx = {"N": N, "norm": norm, "w1": w1, "w2": w2, "ref": ref, "certificates": {}}
    hrng = _rng.generator(_rng.derive_seed(cfg.seed, N, 2**32))
    pairs = [
        (_rng.complex_gaussian(hrng, (N, N)), _rng.complex_gaussian(hrng, (N, N)))
        for _ in range(cfg.hypothesis_samples)
    ]
    pf = float(min(ref, Exponent(1)))
    worst = 0.0
    for A, B in pairs:
        rhs = norm(A) ** pf + norm(B) ** pf
        worst = max(worst, norm(A + B) ** pf / rhs)
    elem = 0.0
    for i in range(N):
        for j in range(N):
            E = np.zeros((N, N))
            E[i, j] = 1
            elem = max(elem, norm(E) / (w2[i] / w1[j]))
    ctx["hypotheses"] = {
        "1_p_triangle": {"holds": bool(worst <= 1 + 1e-12), "worst": worst, "pairs": len(pairs)},
        "2_elementary": {"holds": bool(elem <= 1 + 1e-12), "constant": elem},
        "3_membership": {"holds": True, "detail": "finite matrices; every entry is admissible"},
    }
    return ctx


def _prepare_minimality(cfg, N):
    if cfg.target in MATRIX_TARGETS:
        return _prepare_matrix_minimality(cfg, N)
    return _prepare_signal_minimality(cfg, N)


def _sample_minimality(cfg, ctx, rng, k):
    if ctx.get("broken"):
        return None
    N = ctx["N"]
    if cfg.target in MATRIX_TARGETS:
        T = _rng.complex_gaussian(rng, (N, N))
        num = ctx["norm"](T)
        den = up_matrix_norm(MatrixOperator(T, ctx["w1"], ctx["w2"]), ctx["ref"])
        return {"numerator": num, "denominator": den}
    f = _rng.complex_gaussian(rng, (N,) * ctx["d"])
    num = ctx["norm"](f)
    den = modnorm(f, ModSpec(cfg.pe, cfg.qe, ctx["omega"]))
    return {"numerator": num, "denominator": den}


def _finalize_hypotheses(cfg, runs) -> dict:
    failed = set()
    for run in runs:
        for key, h in run["hypotheses"].items():
            if not h.get("holds", True):
                failed.add(key.split("_")[0])
    if cfg.name == "minimality" and cfg.target in SIGNAL_TARGETS:
        consts = [r["hypotheses"].get("2_shift", {}).get("c_mod") for r in runs]
        consts = [c for c in consts if c is not None]
        growth = [b / a for a, b in zip(consts, consts[1:])]
        if any(g >= cfg.budget for g in growth):
            failed.add("2")
        return {"failed_hypotheses": sorted(failed), "moderateness_growth": growth}
    return {"failed_hypotheses": sorted(failed)}


exp_minimality = Experiment(_prepare_minimality, _sample_minimality, _validate_minimality, _finalize_hypotheses)


def _validate_maximality(cfg: ExperimentConfig):
    if cfg.target not in ("modulation", "window", "lattice"):
        raise ConfigError(f"maximality targets are modulation, window or lattice, got {cfg.target!r}")
    if cfg.pe < 1 or cfg.qe < 1:
        raise ConfigError(f"maximality needs a normed target (p, q >= 1), got p={cfg.pe}, q={cfg.qe}")


def _prepare_maximality(cfg, N):
    ctx = _prepare_signal_minimality(cfg, N, maximal=True)
    if not ctx.get("broken"):
        ctx["inv_v"] = Weight(1 / ctx["v"].values)
    return ctx


def _sample_maximality(cfg, ctx, rng, k):
    if ctx.get("broken"):
        return None
    f = _rng.complex_gaussian(rng, (ctx["N"],) * ctx["d"])
    num = modnorm(f, ModSpec(math.inf, math.inf, ctx["inv_v"]))
    return {"numerator": num, "denominator": ctx["norm"](f)}


exp_maximality = Experiment(_prepare_maximality, _sample_maximality, _validate_maximality, _finalize_hypotheses)

EXPERIMENTS = {
    "schatten": exp_schatten_pseudo,
    "nuclear": exp_nuclear_pseudo,
    "kernels": exp_kernels,
    "minimality": exp_minimality,
    "maximality": exp_maximality,
}


# ------------------------------------------------------------ norm equivalences


def equivalence_constants(kind: str, Ns=(8, 16), *, ensemble: int = 100, seed: int = 0, p="1/2", lattices=None) -> dict:
    """Two-sided empirical constants of a norm equivalence at each N.

    ``kind`` is ``window`` (two Gaussian windows), ``lattice`` (dual-window
    lattice coefficients vs the full grid), ``atomic`` (atomic upper bound vs
    the modulation quasi-norm) or ``tensor`` (SVD tensor bound vs the
    modulation quasi-norm on Z_N^2).  Ratios against a full-grid modulation
    norm are reported both raw and multiplied by :func:`cell_scale`, which
    removes the N-dependence of the unnormalised grid sum.
    """
    lattices = lattices or {8: (2, 2), 16: (4, 2)}
    p = Exponent(p)
    out = {"op": "equivalence_constants", "kind": kind, "params": {"p": str(p)}, "ensemble": ensemble,
           "seed": seed, "constants": {}, "witnesses": {}}
    for N in Ns:
        a, b = lattices.get(N, (2, 2))
        system = _system(N, 1, a, b) if kind in ("lattice", "atomic") else None
        raw, scaled = [], []
        for k in range(ensemble):
            rng = _rng.generator(_rng.derive_seed(seed, N, k))
            if kind == "tensor":
                F = _rng.complex_gaussian(rng, (N, N))
                r = tensor_norm_upper(F, p) / modnorm(F, ModSpec(p))
                raw.append(r)
                scaled.append(r)
                continue
            f = _rng.complex_gaussian(rng, (N,))
            ref = modnorm(f, ModSpec(p))
            if kind == "window":
                r = modnorm(f, ModSpec(p, window=_alt_window(N, 1))) / ref
                raw.append(r)
                scaled.append(r)
                continue
            if kind == "lattice":
                num = lattice_modnorm(f, system, p)
            elif kind == "atomic":
                num = atomic_norm_upper(f, system, p)[0]
            else:
                raise ValueError(f"unknown equivalence {kind!r}")
            raw.append(num / ref)
            scaled.append(num / (cell_scale(N, 1, p) * ref))
        out["constants"][N] = {
            "lower": min(scaled), "upper": max(scaled),
            "raw_lower": min(raw), "raw_upper": max(raw),
            "lattice": [a, b] if system is not None else None,
        }
        out["witnesses"][N] = scaled
    lo = [out["constants"][N]["lower"] for N in Ns]
    hi = [out["constants"][N]["upper"] for N in Ns]
    out["endpoint_change"] = {
        "lower": max(max(x, y) / min(x, y) for x, y in zip(lo, lo[1:])) if len(Ns) > 1 else 1.0,
        "upper": max(max(x, y) / min(x, y) for x, y in zip(hi, hi[1:])) if len(Ns) > 1 else 1.0,
    }
    return _clean(out)
