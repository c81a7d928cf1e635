"""Analytics over solved spectra: removal frequencies, diversity, shortlists.

Low-energy spectra tend to be dominated by near-duplicates of the ground
state; these helpers quantify how often each block appears across the best
solutions and pull out structurally distinct candidates worth inspecting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Solution, Spectrum


@dataclass(frozen=True)
class FrequencyReport:
    """Per-block removal counts over the first spectrum_size solutions."""

    n: int
    counts: tuple[int, ...]
    spectrum_size: int

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if len(counts) != self.n:
            raise ValueError(f"expected {self.n} counts, got {len(counts)}")
        if self.spectrum_size < 0:
            raise ValueError(f"spectrum_size must be nonnegative, got {self.spectrum_size}")
        for i, c in enumerate(counts):
            if not 0 <= c <= self.spectrum_size:
                raise ValueError(
                    f"count for block {i} is {c}, outside [0, {self.spectrum_size}]")
        object.__setattr__(self, "counts", counts)


def removal_frequency(spec: Spectrum, topk: int) -> FrequencyReport:
    """Count, per block, how many of the first topk solutions remove it."""
    if len(spec) == 0:
        raise ValueError("spectrum is empty")
    if not 0 <= topk <= len(spec):
        raise ValueError(f"topk must lie in [0, {len(spec)}], got {topk}")
    n = spec.solutions[0].config.n
    counts = [0] * n
    for sol in spec.solutions[:topk]:
        for i in sol.config.removed:
            counts[i] += 1
    return FrequencyReport(n=n, counts=tuple(counts), spectrum_size=topk)


def pairwise_distance(spec: Spectrum) -> np.ndarray:
    """Hamming distances between removal indicators, as a symmetric int matrix.

    Entry (a, b) is the size of the symmetric difference of the two removed
    sets; the diagonal is zero, and distances between equal-cardinality
    configurations are always even.
    """
    if len(spec) == 0:
        raise ValueError("spectrum is empty")
    x = np.stack([sol.config.indicator() for sol in spec.solutions]).astype(np.int64)
    return np.abs(x[:, None, :] - x[None, :, :]).sum(axis=2)


def select_diverse(spec: Spectrum, k: int) -> list[Solution]:
    """Greedy max-min shortlist of k structurally distinct solutions.

    Starts from the ground state, then repeatedly adds the solution whose
    minimum Hamming distance to everything already chosen is largest.  Ties go
    to the earlier spectrum position, which is the lower-energy and then
    lexicographically smaller candidate.  k = 0 yields an empty list.
    """
    if len(spec) == 0:
        raise ValueError("spectrum is empty")
    if not 0 <= k <= len(spec):
        raise ValueError(f"k must lie in [0, {len(spec)}], got {k}")
    if k == 0:
        return []
    dist = pairwise_distance(spec)
    chosen = [0]
    remaining = list(range(1, len(spec)))
    while len(chosen) < k:
        best_idx = None
        best_min = -1
        for idx in remaining:
            d = min(int(dist[idx, c]) for c in chosen)
            if d > best_min:
                best_min = d
                best_idx = idx
        chosen.append(best_idx)
        remaining.remove(best_idx)
    return [spec.solutions[i] for i in chosen]
