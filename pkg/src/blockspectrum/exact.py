"""Exhaustive top-K solver for the cardinality-constrained removal problem.

Feasible points are the binary vectors with exactly M ones over N blocks; the
objective is the quadratic removal energy.  The full feasible set is walked in
minimal-change (revolving-door) order so each step updates the energy with one
O(M) swap delta instead of an O(M^2) recomputation, with periodic from-scratch
re-anchoring to keep float drift bounded.

The search space is split into independent sub-walks by smallest removed index,
which parallelises across threads without changing results: every partition is
walked in a fixed order, per-partition buffers are merged in partition order,
and the surviving candidates are re-evaluated from scratch before the final
canonical sort.  Output is therefore bit-identical for any thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .core import Configuration, Hessian, Solution, Spectrum, energy, sort_solutions, swap_delta
from ._kernels import REANCHOR_INTERVAL, partition_topk

# Per-partition overflow buffer for near-ties hovering just above the K-th
# energy.  8192 slots is far beyond any realistic degenerate band; if it ever
# fills, the kernel keeps the best entries rather than failing.
EXTRA_CAP = 8192


def count_feasible(n: int, m: int) -> int:
    """Number of feasible configurations: C(n, m) as an exact integer."""
    if n < 0:
        raise ValueError(f"block count must be nonnegative, got {n}")
    if m < 0:
        raise ValueError(f"removal count must be nonnegative, got {m}")
    if m > n:
        raise ValueError(f"cannot remove {m} of {n} blocks")
    return math.comb(n, m)


def revolving_door(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """Yield all k-subsets of range(n) so consecutive subsets differ by one swap.

    Subsets come out as sorted tuples.  The order is the reflected Gray-code
    construction: subsets avoiding the largest element first (recursed forward),
    then subsets containing it (recursed in reverse).
    """
    if not 0 <= k <= n:
        raise ValueError(f"cannot choose {k} of {n}")
    cur: set[int] = set()

    def walk(nn: int, kk: int, fwd: bool) -> Iterator[tuple[int, ...]]:
        if kk == 0:
            yield tuple(sorted(cur))
            return
        if kk == nn:
            cur.update(range(nn))
            yield tuple(sorted(cur))
            cur.difference_update(range(nn))
            return
        if fwd:
            yield from walk(nn - 1, kk, True)
            cur.add(nn - 1)
            yield from walk(nn - 1, kk - 1, False)
            cur.remove(nn - 1)
        else:
            cur.add(nn - 1)
            yield from walk(nn - 1, kk - 1, True)
            cur.remove(nn - 1)
            yield from walk(nn - 1, kk, False)

    return walk(n, k, True)


def enumerate_incremental(hessian: Hessian, m: int,
                          visitor: Callable[[Configuration, float], None]) -> None:
    """Visit every feasible configuration once with its swap-updated energy.

    Walks the m-subsets in revolving-door order, so consecutive configurations
    differ by exactly one swap and the energy advances by a single swap delta.
    One from-scratch evaluation anchors the walk at the start, and the energy
    is re-anchored every REANCHOR_INTERVAL visits to bound float drift.  The
    solver runs this same walk in compiled form; this entry point exists for
    audits and small problems.
    """
    n = hessian.n
    if not 1 <= m < n:
        raise ValueError(f"removal count must be between 1 and {n - 1}, got {m}")
    prev_cfg: Configuration | None = None
    e_run = 0.0
    visits = 0
    for subset in revolving_door(n, m):
        cfg = Configuration(n, subset)
        visits += 1
        if prev_cfg is None or visits % REANCHOR_INTERVAL == 0:
            e_run = energy(hessian, cfg)
        else:
            out_idx = next(iter(set(prev_cfg.removed) - set(subset)))
            in_idx = next(iter(set(subset) - set(prev_cfg.removed)))
            e_run += swap_delta(hessian, prev_cfg, out_idx, in_idx)
        visitor(cfg, e_run)
        prev_cfg = cfg


@dataclass(frozen=True)
class ExactSolveRequest:
    """Inputs for an exhaustive top-K solve."""

    hessian: Hessian
    m: int
    k: int
    degeneracy_tol: float | None = None
    threads: int = 1


def _mask_to_removed(m0: int, m1: int, n: int) -> tuple[int, ...]:
    out = []
    for i in range(n):
        word, bit = (m0, i) if i < 64 else (m1, i - 64)
        if (word >> bit) & 1:
            out.append(i)
    return tuple(out)


def _run_partition(h: np.ndarray, first: int, m: int, kcap: int, tol: float, drift: bool):
    tk_e = np.empty(kcap, np.float64)
    tk_m0 = np.zeros(kcap, np.uint64)
    tk_m1 = np.zeros(kcap, np.uint64)
    ex_e = np.empty(EXTRA_CAP, np.float64)
    ex_m0 = np.zeros(EXTRA_CAP, np.uint64)
    ex_m1 = np.zeros(EXTRA_CAP, np.uint64)
    tk_n, ex_n, visits, max_drift, max_abs_e = partition_topk(
        h, first, m, tol, drift, tk_e, tk_m0, tk_m1, ex_e, ex_m0, ex_m1)
    masks = [(int(tk_m0[i]), int(tk_m1[i])) for i in range(tk_n)]
    masks += [(int(ex_m0[i]), int(ex_m1[i])) for i in range(ex_n)]
    return masks, visits, max_drift, max_abs_e


def solve_topk(request: ExactSolveRequest) -> Spectrum:
    """Exhaustively find the K lowest-energy configurations.

    Partitions the feasible set by smallest removed index, walks each partition
    with the compiled minimal-change kernel keeping a per-partition best-K
    buffer (plus near-tie overflow), then merges, re-evaluates every surviving
    candidate from scratch, and applies the canonical energy-then-lexicographic
    order.  K is clamped to the feasible count.
    """
    hessian = request.hessian
    n = hessian.n
    m = request.m
    if not 1 <= m < n:
        raise ValueError(f"removal count must be between 1 and {n - 1}, got {m}")
    if request.k < 1:
        raise ValueError(f"solution count must be at least 1, got {request.k}")
    if request.threads < 1:
        raise ValueError(f"thread count must be at least 1, got {request.threads}")
    if request.degeneracy_tol is not None and request.degeneracy_tol <= 0:
        raise ValueError("degeneracy tolerance must be positive when given")

    kcap = min(request.k, count_feasible(n, m))
    tol = -1.0 if request.degeneracy_tol is None else float(request.degeneracy_tol)
    h = hessian.entries
    firsts = range(n - m + 1)

    if request.threads == 1:
        results = [_run_partition(h, f, m, kcap, tol, False) for f in firsts]
    else:
        with ThreadPoolExecutor(max_workers=request.threads) as pool:
            results = list(pool.map(
                lambda f: _run_partition(h, f, m, kcap, tol, False), firsts))

    solutions = []
    for masks, _visits, _drift, _scale in results:
        for m0, m1 in masks:
            cfg = Configuration(n, _mask_to_removed(m0, m1, n))
            solutions.append(Solution(cfg, energy(hessian, cfg)))

    ordered = sort_solutions(solutions, request.degeneracy_tol)[:kcap]
    return Spectrum(tuple(ordered), request.degeneracy_tol)


def drift_audit(hessian: Hessian, m: int, threads: int = 1) -> dict:
    """Measure incremental-energy float drift over the full enumeration.

    Runs the solver kernel with per-visit from-scratch comparison enabled and
    returns the worst absolute deviation, the largest energy magnitude seen,
    and the number of configurations visited.
    """
    n = hessian.n
    if not 1 <= m < n:
        raise ValueError(f"removal count must be between 1 and {n - 1}, got {m}")
    h = hessian.entries
    firsts = range(n - m + 1)
    if threads == 1:
        results = [_run_partition(h, f, m, 1, -1.0, True) for f in firsts]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(
                lambda f: _run_partition(h, f, m, 1, -1.0, True), firsts))
    visits = sum(r[1] for r in results)
    max_drift = max(r[2] for r in results)
    max_abs_e = max(r[3] for r in results)
    return {"max_drift": max_drift, "max_abs_energy": max_abs_e, "visits": visits}
