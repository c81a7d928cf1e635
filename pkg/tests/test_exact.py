import itertools
import math

import numpy as np
import pytest

import blockspectrum as bs
from conftest import all_configs, brute_energies, oracle_spectrum, sym_hessian


class TestCountFeasible:
    def test_hand_enumerable(self):
        assert bs.count_feasible(4, 2) == 6

    def test_empty_removal(self):
        assert bs.count_feasible(10, 0) == 1

    def test_full_removal(self):
        assert bs.count_feasible(7, 7) == 1

    def test_rejects_m_above_n(self):
        with pytest.raises(ValueError):
            bs.count_feasible(3, 4)

    def test_rejects_negatives(self):
        with pytest.raises(ValueError):
            bs.count_feasible(-1, 0)
        with pytest.raises(ValueError):
            bs.count_feasible(3, -1)

    def test_pascal_oracle_up_to_40(self):
        # Pascal's triangle in exact integer arithmetic
        row = [1]
        for n in range(1, 41):
            row = [1] + [row[i - 1] + row[i] for i in range(1, n)] + [1]
            for m, want in enumerate(row):
                assert bs.count_feasible(n, m) == want

    def test_no_overflow_at_128(self):
        assert bs.count_feasible(128, 64) == math.comb(128, 64)


class TestRevolvingDoor:
    def test_visits_each_subset_once(self):
        for n in range(1, 9):
            for k in range(0, n + 1):
                seen = list(bs.revolving_door(n, k))
                assert len(seen) == math.comb(n, k)
                assert len(set(seen)) == len(seen)
                assert set(seen) == set(itertools.combinations(range(n), k))

    def test_consecutive_subsets_differ_by_one_swap(self):
        for n, k in [(6, 3), (7, 2), (8, 4), (5, 1)]:
            prev = None
            for cur in bs.revolving_door(n, k):
                if prev is not None:
                    assert len(set(prev) ^ set(cur)) == 2
                prev = cur

    def test_first_subset_is_lexicographic_minimum(self):
        assert next(iter(bs.revolving_door(6, 3))) == (0, 1, 2)

    def test_rejects_bad_k(self):
        with pytest.raises(ValueError):
            bs.revolving_door(3, 4)


class TestEnumerateIncremental:
    def test_visit_count(self):
        h = bs.Hessian(np.eye(4))
        visited = []
        bs.enumerate_incremental(h, 2, lambda cfg, e: visited.append(cfg.removed))
        assert len(visited) == 6
        assert len(set(visited)) == 6

    def test_consecutive_symmetric_difference_two(self, rng):
        h = sym_hessian(rng, 6)
        visited = []
        bs.enumerate_incremental(h, 3, lambda cfg, e: visited.append(cfg.removed))
        for a, b in zip(visited, visited[1:]):
            assert len(set(a) ^ set(b)) == 2

    def test_energy_multiset_matches_oracle(self, rng):
        h = sym_hessian(rng, 10)
        got = []
        bs.enumerate_incremental(h, 4, lambda cfg, e: got.append((cfg.removed, e)))
        combos = all_configs(10, 4)
        want = dict(zip(combos, brute_energies(h.entries, combos)))
        assert len(got) == len(want)
        for removed, e in got:
            assert abs(e - want[removed]) <= 1e-9 * max(1.0, abs(want[removed]))

    def test_every_energy_matches_scratch(self, rng):
        h = sym_hessian(rng, 9)
        def check(cfg, e):
            want = bs.energy(h, cfg)
            assert abs(e - want) <= 1e-9 * max(1.0, abs(want))
        bs.enumerate_incremental(h, 4, check)

    def test_rejects_bad_m(self):
        h = bs.Hessian(np.eye(4))
        with pytest.raises(ValueError):
            bs.enumerate_incremental(h, 0, lambda c, e: None)
        with pytest.raises(ValueError):
            bs.enumerate_incremental(h, 4, lambda c, e: None)


class TestSolveTopk:
    def test_diagonal_example(self):
        h = bs.Hessian(np.diag([1.0, 2.0, 3.0, 4.0]))
        spec = bs.solve_topk(bs.ExactSolveRequest(hessian=h, m=2, k=3))
        assert [(s.config.removed, s.energy) for s in spec.solutions] == [
            ((0, 1), 3.0), ((0, 2), 4.0), ((0, 3), 5.0)]

    def test_identity_fully_degenerate_lexicographic(self):
        spec = bs.solve_topk(bs.ExactSolveRequest(hessian=bs.Hessian(np.eye(5)), m=2, k=4))
        assert [s.config.removed for s in spec.solutions] == [
            (0, 1), (0, 2), (0, 3), (0, 4)]
        assert all(s.energy == 2.0 for s in spec.solutions)

    def test_oracle_12x12(self, rng):
        h = sym_hessian(rng, 12)
        spec = bs.solve_topk(bs.ExactSolveRequest(hessian=h, m=5, k=20))
        want = oracle_spectrum(h.entries, 5, k=20)
        assert len(spec) == 20
        for got, (we, wc) in zip(spec.solutions, want):
            assert got.config.removed == wc
            assert abs(got.energy - we) <= 1e-9 * max(1.0, abs(we))

    def test_k_clamped_to_feasible_count(self):
        h = bs.Hessian(np.eye(4))
        spec = bs.solve_topk(bs.ExactSolveRequest(hessian=h, m=2, k=100))
        assert len(spec) == 6

    def test_rejects_k_zero(self):
        h = bs.Hessian(np.eye(4))
        with pytest.raises(ValueError):
            bs.solve_topk(bs.ExactSolveRequest(hessian=h, m=2, k=0))

    def test_rejects_bad_m(self):
        h = bs.Hessian(np.eye(4))
        with pytest.raises(ValueError):
            bs.solve_topk(bs.ExactSolveRequest(hessian=h, m=0, k=1))
        with pytest.raises(ValueError):
            bs.solve_topk(bs.ExactSolveRequest(hessian=h, m=4, k=1))

    def test_rejects_bad_threads_and_tol(self):
        h = bs.Hessian(np.eye(4))
        with pytest.raises(ValueError):
            bs.solve_topk(bs.ExactSolveRequest(hessian=h, m=2, k=1, threads=0))
        with pytest.raises(ValueError):
            bs.solve_topk(bs.ExactSolveRequest(hessian=h, m=2, k=1, degeneracy_tol=-1e-9))

    def test_thread_count_equality(self, rng):
        h = sym_hessian(rng, 13)
        specs = [bs.solve_topk(bs.ExactSolveRequest(hessian=h, m=6, k=25, threads=t))
                 for t in (1, 2, 8)]
        assert specs[0] == specs[1] == specs[2]

    def test_monotone_and_complete_prefix(self, rng):
        # spectrum energies nondecreasing; nothing outside beats the last member
        for _ in range(10):
            n = int(rng.integers(4, 11))
            m = int(rng.integers(1, n))
            h = sym_hessian(rng, n)
            k = int(rng.integers(1, 12))
            spec = bs.solve_topk(bs.ExactSolveRequest(hessian=h, m=m, k=k))
            energies = [s.energy for s in spec.solutions]
            assert energies == sorted(energies)
            inside = {s.config.removed for s in spec.solutions}
            combos = all_configs(n, m)
            outside = brute_energies(h.entries, [c for c in combos if c not in inside])
            if len(outside) and len(energies):
                assert energies[-1] <= outside.min() + 1e-9 * max(1.0, abs(energies[-1]))

    def test_explicit_degeneracy_tol_reorders_band(self):
        # with a huge tolerance everything is one band: pure lexicographic order
        h = bs.Hessian(np.diag([1.0, 2.0, 3.0, 4.0]))
        spec = bs.solve_topk(bs.ExactSolveRequest(hessian=h, m=2, k=6, degeneracy_tol=100.0))
        assert [s.config.removed for s in spec.solutions] == [
            (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


class TestDriftAudit:
    def test_visits_all_configs(self, rng):
        h = sym_hessian(rng, 12)
        audit = bs.drift_audit(h, 5)
        assert audit["visits"] == bs.count_feasible(12, 5)

    def test_drift_is_tiny(self, rng):
        h = sym_hessian(rng, 14)
        audit = bs.drift_audit(h, 7, threads=4)
        assert audit["max_drift"] <= 1e-8 * max(1.0, audit["max_abs_energy"])
