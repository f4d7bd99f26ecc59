"""Command-line entry point: ``zhanchain <subcommand>``.

Exit codes: 0 success, 1 usage or input error, 2 when ``fuzz`` records a
violation.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .experiments import EnsembleConfig, records_to_csv, run_ensemble
from .inequalities import (
    SizeGuardExceeded,
    counterexample_pair,
    diagonal_subset_sums,
    proof_vectors,
    trace_chain,
    unbounded_family,
    zhan_chain,
)
from .matrix import Matrix, hadamard, matmul, read_matrix
from .spectral import spectral_radius, trace_sequence
from .structure import analyze, is_permutation_matrix, permutation_trace_period

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, allow_nan=False))


def _load(path: str) -> Matrix:
    try:
        return read_matrix(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _pair_report(a: Matrix, b: Matrix, tol: float, ks: Sequence[int]) -> dict:
    return {
        "n": a.n,
        "chain": zhan_chain(a, b, tol).to_dict(),
        "trace_chains": [trace_chain(a, b, k).to_dict() for k in ks],
    }


def cmd_verify(args) -> int:
    a, b = _load(args.a), _load(args.b)
    if a.n != b.n:
        raise UsageError(f"dimension mismatch: {a.n} vs {b.n}")
    _emit(_pair_report(a, b, args.tol, args.k))
    return EXIT_OK


def cmd_fuzz(args) -> int:
    config = EnsembleConfig.load(args.config)
    if args.threads is not None:
        config = dataclasses.replace(config, threads=args.threads)
    if args.dump_dir is not None:
        dump_dir = Path(args.dump_dir)
    elif args.csv is not None:
        dump_dir = Path(args.csv).resolve().parent
    else:
        dump_dir = Path.cwd()
    result = run_ensemble(config, dump_dir=dump_dir)
    if args.csv is not None:
        Path(args.csv).write_text(records_to_csv(result.records))
    _emit({"config": config.to_json(), "summary": result.summary.to_dict()})
    return result.exit_code


def cmd_trace_limit(args) -> int:
    a = _load(args.a)
    seq = trace_sequence(a, args.m_max)
    structure = analyze(a)
    cycles = is_permutation_matrix(a)
    out = {
        "trace_sequence": seq.to_dict(),
        "structure": structure.to_dict(),
        "spectral_radius": spectral_radius(a).to_dict(),
        "permutation_cycle_type": None if cycles is None else list(cycles),
        "permutation_trace_period": None if cycles is None else permutation_trace_period(cycles),
        # the limit (Tr A^m)^(1/m) is only guaranteed for primitive matrices
        "limit_guaranteed": structure.primitive,
        "periodic_pathology": seq.oscillating and not structure.primitive,
    }
    _emit(out)
    return EXIT_OK


def cmd_prooftrace(args) -> int:
    a, b = _load(args.a), _load(args.b)
    if a.n != b.n:
        raise UsageError(f"dimension mismatch: {a.n} vs {b.n}")
    out = {"proof_vectors": proof_vectors(a, b, args.k).to_dict()}
    try:
        s_diag, s_full = diagonal_subset_sums(a, b, args.k)
        out["diagonal_subset"] = {"s_diag": s_diag, "s_full": s_full, "holds": s_diag <= s_full * (1 + 1e-12)}
    except SizeGuardExceeded as exc:
        out["diagonal_subset"] = {"skipped": str(exc)}
    out["trace_chain"] = trace_chain(a, b, args.k).to_dict()
    _emit(out)
    return EXIT_OK


def _radii(a: Matrix, b: Matrix) -> dict:
    return {
        "rho_a": spectral_radius(a).value,
        "rho_b": spectral_radius(b).value,
        "rho_hadamard": spectral_radius(hadamard(a, b)).value,
        "rho_product": spectral_radius(matmul(a, b)).value,
    }


def cmd_counterexample(args) -> int:
    a, b = counterexample_pair()
    pair = {"A": a.tolist(), "B": b.tolist(), **_radii(a, b), "chain": zhan_chain(a, b, args.tol).to_dict()}
    pair["submultiplicativity_fails"] = pair["rho_product"] > pair["rho_a"] * pair["rho_b"]
    x, y = args.family
    fa, fb, exact = unbounded_family(x, y)
    family = {
        "x": x,
        "y": y,
        "A": fa.tolist(),
        "B": fb.tolist(),
        **_radii(fa, fb),
        "exact_rho_product": exact,
        "chain": zhan_chain(fa, fb, args.tol).to_dict(),
    }
    _emit({"counterexample_pair": pair, "unbounded_family": family})
    return EXIT_OK


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _non_negative_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not v >= 0 or v == float("inf"):
        raise argparse.ArgumentTypeError(f"expected a finite non-negative number, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zhanchain", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="check the spectral and trace chains for one pair")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--k", type=_positive_int, action="append", help="trace-chain k (repeatable; default 1 and 2)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fuzz", help="run a random-ensemble campaign")
    p.add_argument("--config", required=True)
    p.add_argument("--csv")
    p.add_argument("--threads", type=_positive_int)
    p.add_argument("--dump-dir", help="where violation_<trial>.{a,b}.mat go (default: CSV dir or cwd)")
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("trace-limit", help="the (Tr A^m)^(1/m) sequence and zero-pattern structure")
    p.add_argument("a")
    p.add_argument("--m-max", type=_positive_int, default=32)
    p.set_defaults(func=cmd_trace_limit)

    p = sub.add_parser("prooftrace", help="replay the Cauchy-Schwarz and diagonal-subset steps")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--k", type=_positive_int, default=1)
    p.set_defaults(func=cmd_prooftrace)

    p = sub.add_parser("counterexample", help="reports for the built-in counterexample pairs")
    p.add_argument("--family", nargs=2, type=_non_negative_float, metavar=("X", "Y"), default=(2.0, 2.0))
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_counterexample)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "k", None) is None and args.command == "verify":
            args.k = [1, 2]
        if getattr(args, "tol", 1.0) <= 0:
            raise UsageError("--tol must be positive")
        if args.command == "trace-limit" and args.m_max < 4:
            raise UsageError("--m-max must be >= 4")
        return args.func(args)
    except (UsageError, ValueError) as exc:
        # MatrixError, ConfigInvalid and SizeGuardExceeded are ValueErrors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
