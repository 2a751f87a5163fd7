"""Command-line interface: ``tfquasi <subcommand> ...``.

Exit codes: 0 success, 1 configuration error (bad flags, missing or malformed
files, violated hypotheses checked up front), 2 numerical failure (no Gabor
frame, a failed experiment).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, NumericalError
from .gabor import GaborLattice, GaborSystem, gabor_matrix, gaussian_window
from .harness import ExperimentConfig, run_experiment, write_report
from .io import (
    dump_json,
    load_json,
    matrix_from_json,
    matrix_to_json,
    phase_from_json,
    phase_to_json,
    signal_from_json,
    signal_to_json,
    weight_from_json,
)
from .opnorms import SpaceSpec, nuclear_upper, schatten_upper
from .quant import apply_op, change_quantization, kernel_of_symbol
from .spaces import Exponent, ModSpec, modnorm, tensor_norm_upper
from .timefreq import stft

EXPERIMENT_COMMANDS = {
    "schatten": "schatten",
    "nuclear": "nuclear",
    "minimality": "minimality",
    "maximality": "maximality",
    "kernels": "kernels",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _weight(spec: str | None, N: int, dim: int):
    """``constant``, ``polynomial:s``, ``exponential:r`` or a Weight JSON file."""
    if spec is None:
        return None
    if Path(spec).suffix == ".json":
        return weight_from_json(load_json(spec), N, dim)
    kind, _, param = spec.partition(":")
    try:
        obj = {"kind": kind, "param": float(param) if param else 0.0}
    except ValueError as exc:
        raise ConfigError(f"bad weight parameter in {spec!r}") from exc
    return weight_from_json(obj, N, dim)


def _signal(path: str):
    return signal_from_json(load_json(path))


def _emit(obj: dict, args, name: str) -> None:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        dump_json(obj, out / f"{name}.json")
    summary = {k: v for k, v in obj.items() if not isinstance(v, (list, dict)) or k in ("frame_bounds",)}
    print(json.dumps(summary, sort_keys=True))


def cmd_stft(args):
    f = _signal(args.signal)
    phi = _signal(args.window) if args.window else gaussian_window(f.shape[0], f.ndim)
    V = stft(f, phi)
    obj = phase_to_json(V)
    obj["energy"] = float(np.sum(np.abs(V) ** 2))
    _emit(obj, args, "stft")


def cmd_dualwin(args):
    if args.window:
        phi = _signal(args.window)
        if args.N is not None and args.N != phi.shape[0]:
            raise ConfigError(f"--N {args.N} does not match the window length {phi.shape[0]}")
    else:
        if args.N is None:
            raise ConfigError("give --window or --N")
        phi = gaussian_window(args.N)
    try:
        lattice = GaborLattice(args.a, args.b, phi.shape[0], phi.ndim)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    system = GaborSystem(phi, lattice)
    gamma = system.dual
    obj = {"dual": signal_to_json(gamma), "a": args.a, "b": args.b, "frame_bounds": list(system.frame_bounds)}
    _emit(obj, args, "dualwin")


def cmd_modnorm(args):
    f = _signal(args.signal)
    N, d = f.shape[0], f.ndim
    phi = _signal(args.window) if args.window else None
    spec = ModSpec(Exponent(args.p), Exponent(args.q or args.p), _weight(args.weight, N, 2 * d), phi)
    _emit({"op": "modnorm", "p": str(spec.p), "q": str(spec.q), "norm": modnorm(f, spec)}, args, "modnorm")


def cmd_quantize(args):
    a = phase_from_json(load_json(args.symbol))
    if args.apply:
        g = apply_op(a, args.A, _signal(args.apply))
        obj = {"op": "apply", "result": signal_to_json(g)}
    elif args.to is not None:
        obj = {"op": "change_quantization", "symbol": phase_to_json(change_quantization(a, args.A, args.to))}
    else:
        obj = {"op": "kernel", "kernel": matrix_to_json(kernel_of_symbol(a, args.A))}
    _emit(obj, args, "quantize")


def _operator_matrix(args):
    """Dense matrix from --matrix, or the Gabor matrix of Op_A(symbol) on the lattice (a, b)."""
    if args.matrix:
        return matrix_from_json(load_json(args.matrix)), None
    if not args.symbol:
        raise ConfigError("give --config, --matrix or --symbol")
    a = phase_from_json(load_json(args.symbol))
    N, d = a.shape[0], a.ndim // 2
    system = GaborSystem.gaussian(N, args.a, args.b, d)
    K = kernel_of_symbol(a, args.A)
    return gabor_matrix(K, system.window, system.dual, system.lattice), system


def _lattice_weight(spec, system, size):
    if spec is None:
        return None
    if system is None:
        return _weight(spec, size, 1).values
    w = _weight(spec, system.lattice.N, 2 * system.lattice.d)
    return system.lattice.restrict(w).ravel()


def _ideal(args, kind):
    M, system = _operator_matrix(args)
    J2, J1 = M.shape
    frm = SpaceSpec.linf(_lattice_weight(args.omega1, system, J1))
    to = SpaceSpec.lp(args.p, _lattice_weight(args.omega2, system, J2))
    if kind == "schatten":
        bound, rep = schatten_upper(M, frm, to, args.q, report=True)
    else:
        bound, rep = nuclear_upper(M, frm, to, args.r, report=True)
    obj = {"op": kind, "bound": bound, "shape": [J2, J1], "report": rep.to_dict()}
    _emit(obj, args, kind)


def cmd_tensor(args):
    F = _signal(args.signal)
    if F.ndim != 2:
        raise ConfigError("tensor needs a signal on Z_N^2")
    N = F.shape[0]
    bound = tensor_norm_upper(F, args.p, _weight(args.v1, N, 2), _weight(args.v2, N, 2))
    _emit({"op": "tensor", "p": str(Exponent(args.p)), "bound": bound}, args, "tensor")


def _experiment_config(args, name) -> ExperimentConfig:
    if args.config:
        obj = load_json(args.config)
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        obj.setdefault("name", name)
        if obj["name"] != name:
            raise ConfigError(f"config is for experiment {obj['name']!r}, not {name!r}")
    else:
        obj = {"name": name, "N": args.N or [8, 16], "seed": args.seed, "ensemble": args.ensemble}
        for key in ("p", "q", "r", "target"):
            value = getattr(args, key, None)
            if value is not None:
                obj[key] = value
    return ExperimentConfig.from_dict(obj)


def run_experiment_command(args, name):
    cfg = _experiment_config(args, name)
    report = run_experiment(cfg)
    if args.out:
        write_report(report, args.out)
    line = {
        "experiment": name,
        "pass": report["pass"],
        "max_ratio": [r["max_ratio"] for r in report["runs"]],
        "growth": report["growth"],
        "determinism_hash": report["determinism_hash"],
    }
    if report.get("failed_hypotheses"):
        line["failed_hypotheses"] = report["failed_hypotheses"]
    print(json.dumps(line, sort_keys=True))
    if report.get("failed_hypotheses"):
        print(f"hypotheses failed: {', '.join(report['failed_hypotheses'])}", file=sys.stderr)
    return 0 if report["pass"] else 2


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tfquasi", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"tfquasi {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--out", help="directory for JSON/CSV outputs")
        p.add_argument("--config", help="experiment config JSON")
        return p

    p = common(sub.add_parser("stft", help="short-time Fourier transform of a signal"))
    p.add_argument("--signal", required=True)
    p.add_argument("--window")

    p = common(sub.add_parser("dualwin", help="canonical dual window of a Gabor system"))
    p.add_argument("--window")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--N", type=int)

    p = common(sub.add_parser("modnorm", help="modulation quasi-norm of a signal"))
    p.add_argument("--signal", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--q")
    p.add_argument("--weight", default="constant")
    p.add_argument("--window")

    p = common(sub.add_parser("quantize", help="kernel, application or change of quantization"))
    p.add_argument("--symbol", required=True)
    p.add_argument("--A", default="0")
    p.add_argument("--apply")
    p.add_argument("--to")

    for name in ("schatten", "nuclear"):
        p = common(sub.add_parser(name, help=f"{name} bound of a matrix/symbol, or the {name} experiment"))
        p.add_argument("--matrix")
        p.add_argument("--symbol")
        p.add_argument("--A", default="0")
        p.add_argument("--a", type=int, default=2)
        p.add_argument("--b", type=int, default=2)
        p.add_argument("--p", default="1")
        p.add_argument("--q", default="1" if name == "schatten" else None)
        p.add_argument("--r", default="1" if name == "nuclear" else None)
        p.add_argument("--omega1")
        p.add_argument("--omega2")
        p.add_argument("--N", type=int, nargs="+")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--ensemble", type=int, default=20)

    for name in ("minimality", "maximality", "kernels"):
        p = common(sub.add_parser(name, help=f"{name} experiment"))
        p.add_argument("--N", type=int, nargs="+")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--ensemble", type=int, default=20)
        p.add_argument("--p")
        p.add_argument("--q")
        p.add_argument("--r")
        if name != "kernels":
            p.add_argument("--target")

    p = common(sub.add_parser("tensor", help="projective tensor bound of a signal on Z_N^2"))
    p.add_argument("--signal", required=True)
    p.add_argument("--p", default="1")
    p.add_argument("--v1")
    p.add_argument("--v2")
    return parser


def _dispatch(args) -> int:
    cmd = args.command
    if cmd in ("schatten", "nuclear"):
        if args.config or (not args.matrix and not args.symbol):
            return run_experiment_command(args, cmd)
        _ideal(args, cmd)
        return 0
    if cmd in EXPERIMENT_COMMANDS:
        return run_experiment_command(args, cmd)
    {
        "stft": cmd_stft,
        "dualwin": cmd_dualwin,
        "modnorm": cmd_modnorm,
        "quantize": cmd_quantize,
        "tensor": cmd_tensor,
    }[cmd](args)
    return 0


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return _dispatch(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
