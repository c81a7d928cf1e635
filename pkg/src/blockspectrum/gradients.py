"""Per-sample gate gradients and the gradient-outer-product Hessian.

A calibration run yields one gradient row per sample: the derivative of that
sample's loss with respect to each block gate, taken at gate value 1.  The
proxy Hessian is the scaled outer product ``H = (1/m) A^T A``, which is
symmetric positive semidefinite by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Hessian, _as_readonly_f64
from .formats import FormatError, format_float, parse_float_row, parse_header


@dataclass(frozen=True)
class GradientMatrix:
    """m x N matrix of per-sample loss gradients with respect to the block gates."""

    rows: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.rows, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
            raise ValueError(f"gradient matrix must be 2-D and nonempty, got shape {a.shape}")
        bad = np.where(~np.all(np.isfinite(a), axis=1))[0]
        if bad.size:
            raise ValueError(f"gradient row {bad[0]} contains a non-finite value")
        object.__setattr__(self, "rows", _as_readonly_f64(a))

    @property
    def m(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1]


def build_hessian(A: GradientMatrix) -> Hessian:
    """Scaled gradient outer product: H[i][j] = (1/m) sum_k A[k][i] A[k][j].

    The accumulation runs in fixed sample order (einsum, no BLAS threading) and
    the upper triangle is mirrored, so the result is exactly symmetric and
    bit-reproducible run to run.
    """
    a = A.rows
    h = np.einsum("ki,kj->ij", a, a) / A.m
    iu = np.triu_indices(A.n, k=1)
    h[(iu[1], iu[0])] = h[iu]
    return Hessian(h)


def gradient_diagnostic(A: GradientMatrix) -> dict:
    """Summarize how close the mean gate gradient is to zero.

    The quadratic proxy drops the first-order term of the loss expansion on
    the assumption that the model is trained to a gradient near zero; this
    report quantifies that assumption without enforcing it.  Returns
    ``per_block_mean`` (mean gradient per gate), ``mean_grad_norm`` (Euclidean
    norm of that vector), and ``per_block_rms``.
    """
    a = A.rows
    mean = a.sum(axis=0) / A.m
    rms = np.sqrt((a * a).sum(axis=0) / A.m)
    return {
        "mean_grad_norm": float(np.linalg.norm(mean)),
        "per_block_mean": [float(v) for v in mean],
        "per_block_rms": [float(v) for v in rms],
    }


def save_gradients(A: GradientMatrix, path: str | Path) -> None:
    """Write a gradient matrix in the GRAD-1 text format."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as f:
        f.write(f"GRAD-1 {A.m} {A.n}\n")
        for row in A.rows:
            f.write(" ".join(format_float(v) for v in row) + "\n")


def load_gradients(path: str | Path) -> GradientMatrix:
    """Read a GRAD-1 file; malformed rows are reported with their line number."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as f:
        lines = f.read().splitlines()
    if not lines:
        raise FormatError("empty file", path=path, line=1)
    m, n = parse_header(lines[0], "GRAD-1", 2, path=path)
    if len(lines) < 1 + m:
        raise FormatError(f"expected {m} gradient rows, file has {len(lines) - 1}", path=path,
                          line=len(lines))
    rows = [parse_float_row(lines[1 + k], n, path=path, line=2 + k) for k in range(m)]
    extra = [ln for ln in lines[1 + m:] if ln.strip()]
    if extra:
        raise FormatError("trailing data after gradient rows", path=path, line=2 + m)
    return GradientMatrix(np.array(rows, dtype=np.float64))
