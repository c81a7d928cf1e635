"""Swap-move simulated annealing for regimes beyond exhaustive enumeration.

Moves exchange one removed index with one kept index, so every visited
configuration has cardinality exactly M and no penalty term is needed inside
the sampler.  Accepted states feed a bounded pool of distinct low-energy
configurations; each restart's best state gets a steepest-descent polish
before entering the pool.  Everything is driven by a seeded generator, so a
given (hessian, m, config) triple always produces the same spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Configuration, Hessian, Solution, Spectrum, energy, sort_solutions, swap_delta

# Relative slack for the cooling-schedule consistency check.
_SCHEDULE_REL = 1e-9


@dataclass(frozen=True)
class AnnealConfig:
    """Annealing schedule and search-budget parameters.

    The cooling factor is stored explicitly and must reproduce t_final from
    t_initial over steps_per_restart steps within 1e-9 relative, which keeps
    serialized configs honest about the schedule they ran.
    """

    restarts: int
    steps_per_restart: int
    t_initial: float
    t_final: float
    cooling: float
    seed: int
    pool_size: int

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise ValueError(f"restarts must be positive, got {self.restarts}")
        if self.steps_per_restart < 1:
            raise ValueError(f"steps_per_restart must be positive, got {self.steps_per_restart}")
        if not (self.t_initial > 0 and math.isfinite(self.t_initial)):
            raise ValueError(f"t_initial must be a positive finite real, got {self.t_initial}")
        if not (0 < self.t_final < self.t_initial):
            raise ValueError(
                f"t_final must lie in (0, t_initial), got {self.t_final} with t_initial {self.t_initial}")
        if not 0 < self.cooling < 1:
            raise ValueError(f"cooling factor must lie in (0, 1), got {self.cooling}")
        if self.pool_size < 1:
            raise ValueError(f"pool_size must be positive, got {self.pool_size}")
        implied = self.t_initial * self.cooling ** self.steps_per_restart
        if abs(implied - self.t_final) > _SCHEDULE_REL * abs(self.t_final):
            raise ValueError(
                f"cooling factor {self.cooling} does not reach t_final {self.t_final} "
                f"in {self.steps_per_restart} steps (lands at {implied})")


def default_config(hessian: Hessian, seed: int = 0) -> AnnealConfig:
    """Scale-aware default schedule for the given problem.

    Starts at the largest diagonal magnitude of the Hessian (the energy scale
    of a single removal), cools geometrically to 1e-6 of that over 10^4 steps,
    8 restarts, pool of 32.
    """
    diag = np.abs(np.diagonal(hessian.entries))
    t0 = float(diag.max())
    if t0 == 0.0:
        t0 = 1.0  # zero Hessian: any temperature works, schedule just needs to be valid
    steps = 10_000
    t_final = 1e-6 * t0
    cooling = (t_final / t0) ** (1.0 / steps)
    return AnnealConfig(restarts=8, steps_per_restart=steps, t_initial=t0,
                        t_final=t_final, cooling=cooling, seed=seed, pool_size=32)


def local_search(hessian: Hessian, m: int, start: Configuration, seed: int) -> Solution:
    """Steepest-descent polish: apply the best strictly-improving swap until none.

    Tie among equal deltas goes to the lexicographically smallest (out, in)
    pair.  Energy strictly decreases each step over a finite space, so this
    terminates.  The seed is accepted for interface symmetry with anneal; the
    descent itself is deterministic and never consumes randomness.
    """
    n = hessian.n
    if start.n != n:
        raise ValueError(f"start configuration is over {start.n} blocks but hessian is {n}x{n}")
    if start.cardinality != m:
        raise ValueError(f"start has cardinality {start.cardinality}, expected {m}")
    cur = start
    while True:
        removed_set = set(cur.removed)
        kept = [i for i in range(n) if i not in removed_set]
        best_delta = 0.0
        best_move = None
        for out_idx in cur.removed:
            for in_idx in kept:
                delta = swap_delta(hessian, cur, out_idx, in_idx)
                if delta < best_delta:
                    best_delta = delta
                    best_move = (out_idx, in_idx)
        if best_move is None:
            break
        out_idx, in_idx = best_move
        cur = Configuration(n, tuple(sorted(removed_set - {out_idx} | {in_idx})))
    return Solution(cur, energy(hessian, cur))


def anneal(hessian: Hessian, m: int, cfg: AnnealConfig) -> Spectrum:
    """Collect a pool of distinct low-energy configurations by annealing.

    Each restart walks steps_per_restart swap proposals under Metropolis
    acceptance min(1, exp(-delta/T)) with geometric cooling, from an
    independent uniformly random M-subset (restart r reseeds the generator
    with seed XOR r).  Accepted states are offered to a bounded pool that
    admits distinct configurations better than its current worst member; each
    restart's best state is polished by steepest descent before the offer.
    Pool energies are recomputed from scratch at the end and ordered
    canonically.
    """
    n = hessian.n
    if not 1 <= m < n:
        raise ValueError(f"removal count must be between 1 and {n - 1}, got {m}")

    pool: dict[tuple[int, ...], float] = {}
    worst_key: tuple[float, tuple[int, ...]] | None = None

    def offer(removed: tuple[int, ...], e: float) -> None:
        nonlocal worst_key
        if removed in pool:
            return
        if len(pool) < cfg.pool_size:
            pool[removed] = e
            if len(pool) == cfg.pool_size:
                worst_key = max((en, rt) for rt, en in pool.items())
            return
        assert worst_key is not None
        if (e, removed) < worst_key:
            del pool[worst_key[1]]
            pool[removed] = e
            worst_key = max((en, rt) for rt, en in pool.items())

    for restart in range(cfg.restarts):
        rng = np.random.default_rng(cfg.seed ^ restart)
        start = tuple(int(i) for i in np.sort(rng.choice(n, size=m, replace=False)))
        cur = Configuration(n, start)
        kept = sorted(set(range(n)) - set(start))
        e_cur = energy(hessian, cur)
        best_cfg = cur
        e_best = e_cur
        offer(cur.removed, e_cur)

        t = cfg.t_initial
        for _step in range(cfg.steps_per_restart):
            out_idx = cur.removed[int(rng.integers(m))]
            in_pos = int(rng.integers(n - m))
            in_idx = kept[in_pos]
            delta = swap_delta(hessian, cur, out_idx, in_idx)
            if delta <= 0.0 or rng.random() < math.exp(-delta / t):
                cur = Configuration(n, tuple(sorted(set(cur.removed) - {out_idx} | {in_idx})))
                kept[in_pos] = out_idx
                kept.sort()
                e_cur += delta
                offer(cur.removed, e_cur)
                if e_cur < e_best:
                    best_cfg = cur
                    e_best = e_cur
            t *= cfg.cooling

        polished = local_search(hessian, m, best_cfg, cfg.seed ^ restart)
        offer(polished.config.removed, polished.energy)

    solutions = [Solution(Configuration(n, removed), energy(hessian, Configuration(n, removed)))
                 for removed in pool]
    ordered = sort_solutions(solutions)[:cfg.pool_size]
    return Spectrum(tuple(ordered))
