"""JSON readers and writers for signals, phase arrays, weights, Gabor systems and matrices."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .gabor import GaborLattice, GaborSystem
from .lattice import Grid, as_signal
from .weights import Weight, standard_weight

__all__ = [
    "signal_to_json",
    "signal_from_json",
    "phase_to_json",
    "phase_from_json",
    "weight_to_json",
    "weight_from_json",
    "system_to_json",
    "system_from_json",
    "matrix_to_json",
    "matrix_from_json",
    "load_json",
    "dump_json",
]


def load_json(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"no such file: {path}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc


def dump_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _complex_values(obj: dict, length: int) -> np.ndarray:
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros(len(obj["re"]))), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed complex array: {exc}") from exc
    if re.shape != (length,) or im.shape != (length,):
        raise ConfigError(f"expected {length} values, got re={re.size}, im={im.size}")
    return re + 1j * im


def signal_to_json(f) -> dict:
    f = as_signal(f)
    flat = f.ravel()
    return {"N": f.shape[0], "d": f.ndim, "re": flat.real.tolist(), "im": flat.imag.tolist()}


def signal_from_json(obj: dict) -> np.ndarray:
    try:
        grid = Grid(int(obj["N"]), int(obj.get("d", 1)))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"malformed signal: {exc}") from exc
    return _complex_values(obj, grid.size).reshape(grid.shape)


def phase_to_json(V) -> dict:
    V = np.asarray(V, dtype=complex)
    flat = V.ravel()
    return {"N": V.shape[0], "d2": V.ndim, "re": flat.real.tolist(), "im": flat.imag.tolist()}


def phase_from_json(obj: dict) -> np.ndarray:
    try:
        N, d2 = int(obj["N"]), int(obj["d2"])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"malformed phase array: {exc}") from exc
    if d2 < 2 or d2 % 2:
        raise ConfigError(f"d2 must be even and positive, got {d2}")
    Grid(N, d2 // 2)
    return _complex_values(obj, N**d2).reshape((N,) * d2)


def weight_to_json(w: Weight) -> dict:
    return {
        "grid": {"N": w.N, "dim": w.dim},
        "kind": w.kind,
        "param": w.param,
        "values": w.values.ravel().tolist(),
    }


def weight_from_json(obj, N: int | None = None, dim: int | None = None) -> Weight:
    """Read a weight object, or a shorthand such as ``"constant"`` / ``{"kind": ..., "param": ...}``."""
    if isinstance(obj, str):
        obj = {"kind": obj}
    if not isinstance(obj, dict):
        raise ConfigError(f"weight must be a string or object, got {type(obj).__name__}")
    grid = obj.get("grid", {})
    N = int(grid.get("N", N or 0))
    dim = int(grid.get("dim", dim or 0))
    if "values" in obj:
        vals = np.asarray(obj["values"], dtype=float)
        if N and dim and vals.size != N**dim:
            raise ConfigError(f"weight has {vals.size} values, grid needs {N**dim}")
        if not N or not dim:
            raise ConfigError("weight with explicit values needs a grid")
        try:
            return Weight(vals.reshape((N,) * dim), obj.get("kind", "custom"), obj.get("param"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if not N or not dim:
        raise ConfigError("weight grid unknown")
    try:
        return standard_weight(obj.get("kind", "constant"), N, dim, float(obj.get("param", 0.0) or 0.0))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def system_to_json(system: GaborSystem) -> dict:
    return {"window": signal_to_json(system.window), "a": system.lattice.a, "b": system.lattice.b}


def system_from_json(obj: dict) -> GaborSystem:
    window = signal_from_json(obj["window"])
    try:
        lattice = GaborLattice(int(obj["a"]), int(obj["b"]), window.shape[0], window.ndim)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"malformed Gabor system: {exc}") from exc
    return GaborSystem(window, lattice)


def matrix_to_json(M) -> dict:
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    flat = M.ravel()
    return {"shape": list(M.shape), "re": flat.real.tolist(), "im": flat.imag.tolist()}


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        shape = tuple(int(s) for s in obj["shape"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed matrix: {exc}") from exc
    if len(shape) != 2:
        raise ConfigError("matrix shape must have two entries")
    return _complex_values(obj, shape[0] * shape[1]).reshape(shape)
