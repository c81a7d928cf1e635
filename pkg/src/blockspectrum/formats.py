"""Shared plumbing for the line-oriented text formats (HESS-1, GRAD-1, QUBO-1, ISING-1).

Each format is UTF-8 text with a one-line header ``<MAGIC> <dims...>`` followed
by whitespace-separated decimal floats.  Floats are written with ``repr`` so a
save/load round trip reproduces the exact same doubles.
"""

from __future__ import annotations

import math
from pathlib import Path


class FormatError(ValueError):
    """Raised when a data file violates its format contract.

    ``line`` is the 1-based line number of the offending line (the header is
    line 1), or None when the problem is not tied to a single line.
    """

    def __init__(self, message: str, *, path: str | Path | None = None, line: int | None = None):
        self.path = str(path) if path is not None else None
        self.line = line
        prefix = ""
        if self.path is not None:
            prefix += f"{self.path}: "
        if line is not None:
            prefix += f"line {line}: "
        super().__init__(prefix + message)


def parse_header(text: str, magic: str, n_dims: int, *, path: str | Path | None = None) -> list[int]:
    """Parse a header line ``<magic> <int>...`` and return the dimension ints."""
    parts = text.split()
    if not parts or parts[0] != magic:
        raise FormatError(f"expected header starting with {magic!r}, got {text.strip()!r}",
                          path=path, line=1)
    if len(parts) != 1 + n_dims:
        raise FormatError(f"{magic} header needs {n_dims} dimension field(s), got {len(parts) - 1}",
                          path=path, line=1)
    dims = []
    for p in parts[1:]:
        try:
            v = int(p)
        except ValueError:
            raise FormatError(f"non-integer dimension {p!r} in {magic} header", path=path, line=1) from None
        if v <= 0:
            raise FormatError(f"dimension must be positive, got {v}", path=path, line=1)
        dims.append(v)
    return dims


def parse_float_row(text: str, expect: int, *, path: str | Path | None, line: int) -> list[float]:
    """Parse one row of ``expect`` finite decimal floats."""
    parts = text.split()
    if len(parts) != expect:
        raise FormatError(f"expected {expect} values, got {len(parts)}", path=path, line=line)
    values = []
    for p in parts:
        try:
            v = float(p)
        except ValueError:
            raise FormatError(f"unparseable value {p!r}", path=path, line=line) from None
        if not math.isfinite(v):
            raise FormatError(f"non-finite value {p!r}", path=path, line=line)
        values.append(v)
    return values


def format_float(x: float) -> str:
    """Shortest decimal string that round-trips the exact double."""
    return repr(float(x))
