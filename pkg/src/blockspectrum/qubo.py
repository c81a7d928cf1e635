"""Penalty reformulation to QUBO and the spin-variable (Ising) mapping.

The cardinality constraint is folded into the objective as a quadratic
penalty: x^T H x + penalty * (sum(x) - M)^2, which expands to a plain QUBO
x^T Q x + constant over unconstrained binaries (linear terms live on the
diagonal since x_i^2 = x_i).  The spin form substitutes s_i = 1 - 2 x_i, under
which a feasible configuration has fixed magnetization sum(s) = N - 2M.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Configuration, Hessian, SYMMETRY_REL, _as_readonly_f64
from .formats import FormatError, format_float, parse_float_row, parse_header


def _check_symmetric(a: np.ndarray, what: str) -> None:
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    asym = float(np.max(np.abs(a - a.T)))
    if asym > SYMMETRY_REL * scale:
        raise ValueError(f"{what} must be symmetric: max asymmetry {asym:g} "
                         f"exceeds {SYMMETRY_REL * scale:g}")


@dataclass(frozen=True)
class QuboInstance:
    """Unconstrained binary quadratic: objective x^T quadratic x + constant."""

    quadratic: np.ndarray
    constant: float

    def __post_init__(self):
        q = np.asarray(self.quadratic, dtype=np.float64)
        if q.ndim != 2 or q.shape[0] != q.shape[1] or q.shape[0] == 0:
            raise ValueError(f"quadratic must be a nonempty square matrix, got shape {q.shape}")
        if not np.all(np.isfinite(q)):
            raise ValueError("quadratic entries must be finite")
        _check_symmetric(q, "QUBO matrix")
        if not np.isfinite(self.constant):
            raise ValueError(f"constant must be finite, got {self.constant}")
        object.__setattr__(self, "quadratic", _as_readonly_f64(q))
        object.__setattr__(self, "constant", float(self.constant))

    @property
    def n(self) -> int:
        return self.quadratic.shape[0]

    def objective(self, x) -> float:
        """Evaluate x^T Q x + constant for a 0/1 assignment x."""
        v = np.asarray(x, dtype=np.float64)
        if v.shape != (self.n,):
            raise ValueError(f"assignment must have length {self.n}, got shape {v.shape}")
        return float(v @ self.quadratic @ v + self.constant)


@dataclass(frozen=True)
class IsingInstance:
    """Spin-variable form: objective s^T j s + h . s + offset over s in {-1,+1}^N.

    The coupling matrix j is symmetric with zero diagonal and both (i, k) and
    (k, i) entries contribute to the objective.
    """

    h: np.ndarray
    j: np.ndarray
    offset: float

    def __post_init__(self):
        hv = np.asarray(self.h, dtype=np.float64)
        jm = np.asarray(self.j, dtype=np.float64)
        if hv.ndim != 1 or hv.shape[0] == 0:
            raise ValueError(f"field vector must be 1-D and nonempty, got shape {hv.shape}")
        n = hv.shape[0]
        if jm.shape != (n, n):
            raise ValueError(f"coupling matrix must be {n}x{n}, got shape {jm.shape}")
        if not (np.all(np.isfinite(hv)) and np.all(np.isfinite(jm)) and np.isfinite(self.offset)):
            raise ValueError("Ising terms must all be finite")
        _check_symmetric(jm, "coupling matrix")
        scale = max(1.0, float(np.max(np.abs(jm))))
        diag = float(np.max(np.abs(np.diagonal(jm))))
        if diag > SYMMETRY_REL * scale:
            raise ValueError(f"coupling matrix must have zero diagonal, max |j[i][i]| = {diag:g}")
        object.__setattr__(self, "h", _as_readonly_f64(hv))
        object.__setattr__(self, "j", _as_readonly_f64(jm))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def n(self) -> int:
        return self.h.shape[0]

    def objective(self, s) -> float:
        """Evaluate s^T j s + h . s + offset for a +/-1 assignment s."""
        v = np.asarray(s, dtype=np.float64)
        if v.shape != (self.n,):
            raise ValueError(f"assignment must have length {self.n}, got shape {v.shape}")
        return float(v @ self.j @ v + self.h @ v + self.offset)


def to_qubo(hessian: Hessian, m: int, penalty: float) -> QuboInstance:
    """Fold the cardinality-M constraint into the objective as a penalty.

    Encodes x^T H x + penalty * (sum(x) - M)^2.  Expanding the square and using
    x_i^2 = x_i gives Q[i][j] = H[i][j] + penalty off the diagonal,
    Q[i][i] = H[i][i] + penalty * (1 - 2M), and constant penalty * M^2; the
    identity holds exactly for every binary x, feasible or not.
    """
    n = hessian.n
    if not 1 <= m < n:
        raise ValueError(f"removal count must be between 1 and {n - 1}, got {m}")
    if not (penalty > 0 and np.isfinite(penalty)):
        raise ValueError(f"penalty must be a positive finite real, got {penalty}")
    q = hessian.entries + penalty
    np.fill_diagonal(q, np.diagonal(hessian.entries) + penalty * (1 - 2 * m))
    return QuboInstance(q, penalty * m * m)


def default_penalty(hessian: Hessian, m: int) -> float:
    """Penalty weight 1 + 4 N max|H| making every QUBO minimizer feasible.

    A single bit flip changes the quadratic part by at most (2N+1) max|H|,
    while moving one step toward cardinality M drops the penalty term by at
    least the weight itself; with this weight the drop always dominates, so no
    cardinality-violating x can be a local (hence global) minimizer.
    """
    n = hessian.n
    if not 1 <= m < n:
        raise ValueError(f"removal count must be between 1 and {n - 1}, got {m}")
    return 1.0 + 4.0 * n * float(np.max(np.abs(hessian.entries)))


def to_ising(q: QuboInstance) -> IsingInstance:
    """Map binaries to spins via s_i = 1 - 2 x_i, preserving the objective exactly.

    For every x and its spin image the two objectives agree: couplings are
    Q[i][k] / 4 off the diagonal, fields collect the row sums, and the constant
    terms absorb what is left.
    """
    qm = q.quadratic
    j = qm / 4.0
    np.fill_diagonal(j, 0.0)
    h = -qm.sum(axis=1) / 2.0
    offset = q.constant + (float(qm.sum()) + float(np.trace(qm))) / 4.0
    return IsingInstance(h, j, offset)


def spins(config: Configuration) -> np.ndarray:
    """Spin image s = 1 - 2x of a configuration; sum(s) = n - 2 cardinality."""
    return 1.0 - 2.0 * config.indicator()


def export_qubo(q: QuboInstance, path) -> None:
    """Write the QUBO-1 sparse text format (upper triangle, zeros omitted)."""
    lines = [f"QUBO-1 {q.n}", f"c {format_float(q.constant)}"]
    for i in range(q.n):
        for k in range(i, q.n):
            v = q.quadratic[i, k]
            if v != 0.0:
                lines.append(f"{i} {k} {format_float(v)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_qubo(path) -> QuboInstance:
    """Read a QUBO-1 file back into an instance; entries absent from the file are zero."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty file", path=str(path), line=1)
    (n,) = parse_header(lines[0], "QUBO-1", 1, path=str(path))
    quadratic = np.zeros((n, n), dtype=np.float64)
    constant = None
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(lines[1:], start=2):
        parts = raw.split()
        if len(parts) == 2 and parts[0] == "c":
            if constant is not None:
                raise FormatError("duplicate constant line", path=str(path), line=lineno)
            constant = parse_float_row(parts[1], 1, path=str(path), line=lineno)[0]
            continue
        if len(parts) != 3:
            raise FormatError(f"expected '<i> <j> <value>', got {raw!r}",
                              path=str(path), line=lineno)
        try:
            i, k = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError(f"bad index pair {parts[0]!r} {parts[1]!r}",
                              path=str(path), line=lineno) from None
        if not (0 <= i <= k < n):
            raise FormatError(f"index pair ({i}, {k}) outside upper triangle of {n}x{n}",
                              path=str(path), line=lineno)
        if (i, k) in seen:
            raise FormatError(f"duplicate entry for ({i}, {k})", path=str(path), line=lineno)
        seen.add((i, k))
        v = parse_float_row(parts[2], 1, path=str(path), line=lineno)[0]
        quadratic[i, k] = v
        quadratic[k, i] = v
    if constant is None:
        raise FormatError("missing constant line 'c <value>'", path=str(path), line=1)
    return QuboInstance(quadratic, constant)


def export_ising(inst: IsingInstance, path) -> None:
    """Write the ISING-1 text format: offset, nonzero fields, upper-triangle couplings."""
    lines = [f"ISING-1 {inst.n}", f"c {format_float(inst.offset)}"]
    for i in range(inst.n):
        if inst.h[i] != 0.0:
            lines.append(f"h {i} {format_float(inst.h[i])}")
    for i in range(inst.n):
        for k in range(i + 1, inst.n):
            v = inst.j[i, k]
            if v != 0.0:
                lines.append(f"J {i} {k} {format_float(v)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_ising(path) -> IsingInstance:
    """Read an ISING-1 file back into an instance."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty file", path=str(path), line=1)
    (n,) = parse_header(lines[0], "ISING-1", 1, path=str(path))
    h = np.zeros(n, dtype=np.float64)
    j = np.zeros((n, n), dtype=np.float64)
    offset = None
    seen_h: set[int] = set()
    seen_j: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(lines[1:], start=2):
        parts = raw.split()
        if len(parts) == 2 and parts[0] == "c":
            if offset is not None:
                raise FormatError("duplicate constant line", path=str(path), line=lineno)
            offset = parse_float_row(parts[1], 1, path=str(path), line=lineno)[0]
            continue
        if len(parts) == 3 and parts[0] == "h":
            try:
                i = int(parts[1])
            except ValueError:
                raise FormatError(f"bad index {parts[1]!r}", path=str(path), line=lineno) from None
            if not 0 <= i < n:
                raise FormatError(f"field index {i} outside [0, {n})", path=str(path), line=lineno)
            if i in seen_h:
                raise FormatError(f"duplicate field entry for {i}", path=str(path), line=lineno)
            seen_h.add(i)
            h[i] = parse_float_row(parts[2], 1, path=str(path), line=lineno)[0]
            continue
        if len(parts) == 4 and parts[0] == "J":
            try:
                i, k = int(parts[1]), int(parts[2])
            except ValueError:
                raise FormatError(f"bad index pair {parts[1]!r} {parts[2]!r}",
                                  path=str(path), line=lineno) from None
            if not (0 <= i < k < n):
                raise FormatError(f"coupling pair ({i}, {k}) must satisfy 0 <= i < k < {n}",
                                  path=str(path), line=lineno)
            if (i, k) in seen_j:
                raise FormatError(f"duplicate coupling entry for ({i}, {k})",
                                  path=str(path), line=lineno)
            seen_j.add((i, k))
            v = parse_float_row(parts[3], 1, path=str(path), line=lineno)[0]
            j[i, k] = v
            j[k, i] = v
            continue
        raise FormatError(f"unrecognized line {raw!r}", path=str(path), line=lineno)
    if offset is None:
        raise FormatError("missing constant line 'c <value>'", path=str(path), line=1)
    return IsingInstance(h, j, offset)
