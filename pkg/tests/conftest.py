"""Shared helpers: seeded instance generators and the naive sort-everything oracle.

The oracle deliberately re-derives everything the solver computes through a
different path: energies via a vectorized bilinear form instead of the
package's fixed-order double loop, and the canonical ordering re-implemented
inline instead of calling the library sorter.
"""

import itertools
from pathlib import Path

import numpy as np
import pytest

import blockspectrum as bs

FIXTURES = Path(__file__).parent / "fixtures"


def sym_hessian(rng, n, scale=1.0):
    a = rng.normal(size=(n, n)) * scale
    return bs.Hessian((a + a.T) / 2.0)


def all_configs(n, m):
    return list(itertools.combinations(range(n), m))


def brute_energies(entries, combos):
    """Energies of the given subsets via the bilinear form (independent path)."""
    n = entries.shape[0]
    x = np.zeros((len(combos), n))
    for r, combo in enumerate(combos):
        x[r, list(combo)] = 1.0
    return np.einsum("ci,ij,cj->c", x, entries, x)


def oracle_spectrum(entries, m, k=None, tol=None):
    """Materialize every subset, sort by the documented order, truncate to k.

    Re-implements the canonical order from its definition: sort by
    (energy, removed), chain adjacent pairs within tolerance into degenerate
    bands, order each band lexicographically.  Default tolerance is the
    adaptive 1e-10 * max(1, |e1|) rule.
    """
    combos = all_configs(entries.shape[0], m)
    energies = brute_energies(entries, combos)
    pairs = sorted(zip(energies.tolist(), combos))
    out = []
    i = 0
    while i < len(pairs):
        j = i + 1
        while j < len(pairs):
            e1, e2 = pairs[j - 1][0], pairs[j][0]
            t = tol if tol is not None else 1e-10 * max(1.0, abs(e1))
            if abs(e2 - e1) <= t:
                j += 1
            else:
                break
        out.extend(sorted(pairs[i:j], key=lambda p: p[1]))
        i = j
    if k is not None:
        out = out[:k]
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(0xB10C)
