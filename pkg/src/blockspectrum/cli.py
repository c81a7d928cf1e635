"""Command-line pipeline: gradients -> Hessian -> spectrum -> analysis.

Subcommands:
  build-hessian   GRAD-1 in, HESS-1 out, gradient diagnostic on stderr
  solve           HESS-1 in, SolutionDocument JSON out (exact or anneal)
  export          HESS-1 in, penalized QUBO-1 or ISING-1 out
  analyze         SolutionDocument in, frequency/diversity JSON on stdout

Exit codes are a stable contract: 0 success, 2 usage or validation failure,
3 resource guard refusal, 4 I/O failure.  BLOCKSPECTRUM_THREADS sets the
default thread count; the --threads flag overrides it.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from .analysis import pairwise_distance, removal_frequency, select_diverse
from .anneal import anneal, default_config
from .core import Spectrum, load_hessian, save_hessian
from .document import (TOOL_VERSION, build_document, load_document, rank_label,
                       spectrum_from_document, write_document)
from .exact import ExactSolveRequest, count_feasible, solve_topk
from .formats import format_float
from .gradients import build_hessian, gradient_diagnostic, load_gradients
from .qubo import default_penalty, export_ising, export_qubo, to_ising, to_qubo

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_GUARD = 3
EXIT_IO = 4

DEFAULT_GUARD = 10_000_000_000
THREADS_ENV = "BLOCKSPECTRUM_THREADS"


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"{THREADS_ENV} must be positive, got {value}")
    return value


def _cmd_build_hessian(args) -> int:
    grads = load_gradients(args.gradients)
    diag = gradient_diagnostic(grads)
    hessian = build_hessian(grads)
    save_hessian(hessian, args.out)
    rms_norm = sum(v * v for v in diag["per_block_rms"]) ** 0.5
    print(f"samples={grads.m} blocks={grads.n} mean_grad_norm={diag['mean_grad_norm']:.6g} "
          f"rms_norm={rms_norm:.6g}", file=sys.stderr)
    if rms_norm > 0 and diag["mean_grad_norm"] / rms_norm > 0.5:
        print("warning: mean gradient is large relative to its spread; the neglected "
              "first-order term may dominate the quadratic proxy at this operating point",
              file=sys.stderr)
    print(f"wrote {args.out}", file=sys.stderr)
    return EXIT_OK


def _cmd_solve(args) -> int:
    hessian = load_hessian(args.hessian)
    n = hessian.n
    if not 1 <= args.m < n:
        raise ValueError(f"m must be between 1 and {n - 1} for this {n}x{n} hessian, got {args.m}")
    if args.k < 1:
        raise ValueError(f"k must be at least 1, got {args.k}")
    threads = args.threads if args.threads is not None else _default_threads()

    if args.method == "exact":
        feasible = count_feasible(n, args.m)
        if feasible > args.guard_max_feasible:
            print(f"refusing exact solve: C({n}, {args.m}) = {feasible} exceeds the guard "
                  f"of {args.guard_max_feasible}; use --method anneal or raise "
                  f"--guard-max-feasible", file=sys.stderr)
            return EXIT_GUARD
        spectrum = solve_topk(ExactSolveRequest(
            hessian=hessian, m=args.m, k=args.k,
            degeneracy_tol=args.degeneracy_tol, threads=threads))
        doc = build_document(spectrum, "exact", "hessian_path", args.hessian)
    else:
        cfg = dataclasses.replace(default_config(hessian, seed=args.seed),
                                  pool_size=max(args.k, 32))
        pool = anneal(hessian, args.m, cfg)
        truncated = Spectrum(pool.solutions[:args.k], pool.degeneracy_tol)
        doc = build_document(truncated, "anneal", "hessian_path", args.hessian, seed=args.seed)

    write_document(doc, args.out)
    ground = doc["solutions"][0]
    print(f"wrote {args.out}: {len(doc['solutions'])} states, "
          f"{rank_label(0)} energy {format_float(ground['energy'])} "
          f"removed {ground['removed']}", file=sys.stderr)
    return EXIT_OK


def _cmd_export(args) -> int:
    hessian = load_hessian(args.hessian)
    if args.penalty is not None and args.penalty <= 0:
        raise ValueError(f"penalty must be positive, got {args.penalty}")
    penalty = args.penalty if args.penalty is not None else default_penalty(hessian, args.m)
    q = to_qubo(hessian, args.m, penalty)
    if args.format == "qubo":
        export_qubo(q, args.out)
    else:
        export_ising(to_ising(q), args.out)
    print(f"penalty {format_float(penalty)}")
    print(f"wrote {args.out}", file=sys.stderr)
    return EXIT_OK


def _cmd_analyze(args) -> int:
    doc = load_document(args.solutions)
    spectrum = spectrum_from_document(doc)
    topk = args.topk if args.topk is not None else len(spectrum)
    if not 1 <= topk <= len(spectrum):
        raise ValueError(f"topk must lie in [1, {len(spectrum)}], got {topk}")
    truncated = type(spectrum)(spectrum.solutions[:topk], spectrum.degeneracy_tol)
    freq = removal_frequency(truncated, topk)
    dist = pairwise_distance(truncated)
    out = {
        "n": doc["n"],
        "m": doc["m"],
        "topk": topk,
        "frequency": {"n": freq.n, "counts": list(freq.counts),
                      "spectrum_size": freq.spectrum_size},
        "distance_matrix": dist.tolist(),
    }
    if args.select is not None:
        if not 0 <= args.select <= topk:
            raise ValueError(f"select must lie in [0, {topk}], got {args.select}")
        chosen = select_diverse(truncated, args.select)
        ranks = {sol.config.removed: rank for rank, sol in enumerate(truncated.solutions)}
        out["selected"] = [
            {"rank": ranks[sol.config.removed], "removed": list(sol.config.removed),
             "energy": sol.energy}
            for sol in chosen
        ]
    sys.stdout.write(json.dumps(out, sort_keys=True, separators=(",", ":")) + "\n")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockspectrum",
        description="Rank transformer block-removal configurations by quadratic removal energy.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {TOOL_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build-hessian",
                       help="average per-sample gate gradients into a proxy Hessian")
    b.add_argument("--gradients", required=True, help="GRAD-1 input file")
    b.add_argument("--out", required=True, help="HESS-1 output file")
    b.set_defaults(func=_cmd_build_hessian)

    s = sub.add_parser("solve", help="compute the low-energy removal spectrum")
    s.add_argument("--hessian", required=True, help="HESS-1 input file")
    s.add_argument("--m", type=int, required=True, help="number of blocks to remove")
    s.add_argument("--k", type=int, default=20, help="spectrum size (default 20)")
    s.add_argument("--method", choices=("exact", "anneal"), default="exact")
    s.add_argument("--threads", type=int, default=None,
                   help=f"worker threads for exact solves (default ${THREADS_ENV} or 1)")
    s.add_argument("--seed", type=int, default=0, help="annealer seed (default 0)")
    s.add_argument("--degeneracy-tol", type=float, default=None,
                   help="absolute energy tie tolerance (default: adaptive relative)")
    s.add_argument("--guard-max-feasible", type=int, default=DEFAULT_GUARD,
                   help=f"refuse exact solves with more feasible points than this "
                        f"(default {DEFAULT_GUARD})")
    s.add_argument("--out", required=True, help="SolutionDocument JSON output file")
    s.set_defaults(func=_cmd_solve)

    e = sub.add_parser("export", help="write the penalized problem for external solvers")
    e.add_argument("--hessian", required=True, help="HESS-1 input file")
    e.add_argument("--m", type=int, required=True, help="cardinality the penalty targets")
    e.add_argument("--format", choices=("qubo", "ising"), required=True)
    e.add_argument("--penalty", type=float, default=None,
                   help="penalty weight lambda (default: 1 + 4 N max|H|)")
    e.add_argument("--out", required=True, help="QUBO-1 or ISING-1 output file")
    e.set_defaults(func=_cmd_export)

    a = sub.add_parser("analyze", help="frequency and diversity report on a solution document")
    a.add_argument("--solutions", required=True, help="SolutionDocument JSON input file")
    a.add_argument("--topk", type=int, default=None,
                   help="restrict analysis to the first TOPK states (default: all)")
    a.add_argument("--select", type=int, default=None,
                   help="also emit a diverse shortlist of this size")
    a.set_defaults(func=_cmd_analyze)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
