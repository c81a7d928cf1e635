"""Core numeric types: the proxy Hessian, removal configurations, and spectra.

The central quantity is the quadratic form ``E(x) = x^T H x`` over binary
removal indicators ``x`` (x_i = 1 when block i is removed).  Everything else in
the package is built on top of evaluating this energy exactly, updating it
incrementally under single swaps, and ordering configurations by it
reproducibly even when energies are nearly degenerate.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .formats import FormatError, format_float, parse_float_row, parse_header

# Relative scale of the adaptive degeneracy tolerance: two energies are treated
# as degenerate when |e1 - e2| <= DEGENERACY_REL * max(1, |e1|).
DEGENERACY_REL = 1e-10

# Symmetry acceptance for Hessian entries, relative to max(1, max|H|).
SYMMETRY_REL = 1e-12


def _as_readonly_f64(a) -> np.ndarray:
    out = np.ascontiguousarray(a, dtype=np.float64)
    if out is a:
        out = out.copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Hessian:
    """Dense symmetric N x N proxy Hessian over block gates.

    Entries are held in a read-only float64 array; instances are immutable and
    safe to share across threads.
    """

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ValueError(f"hessian must be a nonempty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            bad = np.argwhere(~np.isfinite(a))[0]
            raise ValueError(f"hessian entry [{bad[0]}][{bad[1]}] is not finite")
        scale = max(1.0, float(np.max(np.abs(a))))
        asym = float(np.max(np.abs(a - a.T)))
        if asym > SYMMETRY_REL * scale:
            raise ValueError(
                f"hessian is not symmetric: max |H[i][j] - H[j][i]| = {asym:g} "
                f"exceeds {SYMMETRY_REL:g} * max(1, max|H|) = {SYMMETRY_REL * scale:g}"
            )
        object.__setattr__(self, "entries", _as_readonly_f64(a))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])

    def is_positive_semidefinite(self, rel: float = 1e-8) -> bool:
        """Check the PSD invariant: smallest eigenvalue >= -rel * trace(H)."""
        return self.min_eigenvalue() >= -rel * float(np.trace(self.entries))


@dataclass(frozen=True)
class Configuration:
    """A set of block indices marked for removal, kept strictly increasing."""

    n: int
    removed: tuple[int, ...]

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError(f"block count must be positive, got {self.n}")
        removed = tuple(int(i) for i in self.removed)
        for a, b in zip(removed, removed[1:]):
            if a >= b:
                raise ValueError(f"removed indices must be strictly increasing, got {removed}")
        if removed and (removed[0] < 0 or removed[-1] >= self.n):
            raise ValueError(f"removed indices {removed} out of range [0, {self.n})")
        object.__setattr__(self, "removed", removed)

    @property
    def cardinality(self) -> int:
        return len(self.removed)

    def indicator(self) -> np.ndarray:
        """The 0/1 vector x of length n."""
        x = np.zeros(self.n, dtype=np.float64)
        x[list(self.removed)] = 1.0
        return x


@dataclass(frozen=True)
class Solution:
    config: Configuration
    energy: float


@dataclass(frozen=True)
class Spectrum:
    """Energy-sorted sequence of distinct configurations.

    ``degeneracy_tol`` is the absolute tolerance under which two energies count
    as degenerate (and are then ordered lexicographically by removed indices);
    None selects the adaptive default |e1 - e2| <= 1e-10 * max(1, |e1|).
    """

    solutions: tuple[Solution, ...]
    degeneracy_tol: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "solutions", tuple(self.solutions))
        if self.degeneracy_tol is not None and self.degeneracy_tol < 0:
            raise ValueError("degeneracy_tol must be nonnegative")
        configs = [s.config.removed for s in self.solutions]
        if len(set(configs)) != len(configs):
            raise ValueError("spectrum contains duplicate configurations")
        if list(self.solutions) != sort_solutions(self.solutions, self.degeneracy_tol):
            raise ValueError("solutions are not in canonical spectrum order")

    @classmethod
    def from_solutions(cls, solutions, degeneracy_tol: float | None = None) -> "Spectrum":
        """Build a Spectrum, sorting the given solutions canonically."""
        return cls(tuple(sort_solutions(solutions, degeneracy_tol)), degeneracy_tol)

    def __len__(self) -> int:
        return len(self.solutions)

    @property
    def ground_state(self) -> Solution:
        return self.solutions[0]


def energies_degenerate(e1: float, e2: float, tol: float | None = None) -> bool:
    """Whether two energies fall within the degeneracy tolerance of each other."""
    if tol is None:
        tol = DEGENERACY_REL * max(1.0, abs(e1))
    return abs(e1 - e2) <= tol


def sort_solutions(solutions, tol: float | None = None) -> list[Solution]:
    """Canonical spectrum order: energy ascending, lexicographic within a degenerate band.

    Bands are formed by chaining: after sorting by (energy, removed indices),
    adjacent solutions whose energies are within the tolerance belong to the
    same band, and each band is reordered lexicographically by removed indices.
    The result is a total order; applying this function to its own output is a
    no-op.
    """
    base = sorted(solutions, key=lambda s: (s.energy, s.config.removed))
    out: list[Solution] = []
    i = 0
    while i < len(base):
        j = i + 1
        while j < len(base) and energies_degenerate(base[j - 1].energy, base[j].energy, tol):
            j += 1
        band = sorted(base[i:j], key=lambda s: s.config.removed)
        out.extend(band)
        i = j
    return out


def _check_dims(H: Hessian, config: Configuration) -> None:
    if config.n != H.n:
        raise ValueError(
            f"dimension mismatch: configuration is over {config.n} blocks "
            f"but hessian is {H.n}x{H.n}"
        )


def energy(H: Hessian, config: Configuration) -> float:
    """Quadratic removal energy: sum of H[i][j] over all removed pairs (i, j).

    Summed in a fixed order (outer index ascending, inner index ascending) so
    repeated evaluations are bit-identical regardless of caller parallelism.
    """
    _check_dims(H, config)
    h = H.entries
    total = 0.0
    for i in config.removed:
        row = h[i]
        for j in config.removed:
            total += row[j]
    return float(total)


def swap_delta(H: Hessian, config: Configuration, out_idx: int, in_idx: int) -> float:
    """Energy change from swapping ``out_idx`` out of the removed set for ``in_idx``.

    Computed in O(M) using the symmetry of H:
    H[in][in] - H[out][out] + 2 * sum_{k in removed \\ {out}} (H[k][in] - H[k][out]).
    """
    _check_dims(H, config)
    if out_idx not in config.removed:
        raise ValueError(f"swap-out index {out_idx} is not in the removed set {config.removed}")
    if in_idx in config.removed:
        raise ValueError(f"swap-in index {in_idx} is already in the removed set {config.removed}")
    if not (0 <= in_idx < H.n):
        raise ValueError(f"swap-in index {in_idx} out of range [0, {H.n})")
    h = H.entries
    rest = np.array([k for k in config.removed if k != out_idx], dtype=np.intp)
    cross = float(np.sum(h[rest, in_idx] - h[rest, out_idx])) if rest.size else 0.0
    return float(h[in_idx, in_idx] - h[out_idx, out_idx] + 2.0 * cross)


def save_hessian(H: Hessian, path: str | Path) -> None:
    """Write a Hessian in the HESS-1 text format."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as f:
        f.write(f"HESS-1 {H.n}\n")
        for row in H.entries:
            f.write(" ".join(format_float(v) for v in row) + "\n")


def load_hessian(path: str | Path) -> Hessian:
    """Read a HESS-1 file, rejecting malformed or non-symmetric input."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as f:
        lines = f.read().splitlines()
    if not lines:
        raise FormatError("empty file", path=path, line=1)
    (n,) = parse_header(lines[0], "HESS-1", 1, path=path)
    if len(lines) < 1 + n:
        raise FormatError(f"expected {n} matrix rows, file has {len(lines) - 1}", path=path,
                          line=len(lines))
    rows = [parse_float_row(lines[1 + i], n, path=path, line=2 + i) for i in range(n)]
    extra = [ln for ln in lines[1 + n:] if ln.strip()]
    if extra:
        raise FormatError("trailing data after matrix rows", path=path, line=2 + n)
    try:
        return Hessian(np.array(rows, dtype=np.float64))
    except ValueError as e:
        raise FormatError(str(e), path=path) from None
