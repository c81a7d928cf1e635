"""Solution documents: the machine-readable output of a solve run.

A document captures the problem size, the method, the ordered low-energy
states with 0-based ranks (rank 0 is the ground state, rank r the r-th
excited state, written "CBO: r" in human-readable summaries), and enough
provenance to reproduce the run.  Canonical bytes are fully deterministic:
keys sorted, fixed separators, no timestamps, so identical inputs yield
byte-identical files regardless of thread count.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .core import Configuration, Solution, Spectrum

TOOL_VERSION = "0.1.0"
SCHEMA_VERSION = "1"

_METHODS = ("exact", "anneal")


def rank_label(rank: int) -> str:
    """Human-readable label for a spectrum position: CBO: 0 is the ground state."""
    return f"CBO: {rank}"


def build_document(spectrum: Spectrum, method: str, source_key: str, source_path: str,
                   seed: int | None = None) -> dict:
    """Assemble the document dict for a solved spectrum.

    source_key names the provenance entry ("hessian_path" or "gradients_path").
    The degeneracy tolerance is copied from the spectrum: a number when an
    explicit absolute tolerance governed the ordering, null for the adaptive
    energy-relative default.
    """
    if method not in _METHODS:
        raise ValueError(f"method must be one of {_METHODS}, got {method!r}")
    if source_key not in ("hessian_path", "gradients_path"):
        raise ValueError(f"unknown provenance key {source_key!r}")
    if len(spec_sols := spectrum.solutions) == 0:
        raise ValueError("cannot document an empty spectrum")
    n = spec_sols[0].config.n
    cards = {sol.config.cardinality for sol in spec_sols}
    if len(cards) != 1:
        raise ValueError(f"spectrum mixes cardinalities {sorted(cards)}")
    provenance: dict = {source_key: str(source_path), "tool_version": TOOL_VERSION}
    if method == "anneal":
        if seed is None:
            raise ValueError("heuristic documents must record the seed")
        provenance["seed"] = int(seed)
    return {
        "schema_version": SCHEMA_VERSION,
        "n": n,
        "m": cards.pop(),
        "method": method,
        "degeneracy_tol": spectrum.degeneracy_tol,
        "solutions": [
            {"rank": rank, "removed": list(sol.config.removed), "energy": float(sol.energy)}
            for rank, sol in enumerate(spec_sols)
        ],
        "provenance": provenance,
    }


def document_bytes(doc: dict) -> bytes:
    """Canonical serialization: sorted keys, no whitespace, trailing newline."""
    return (json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n").encode("ascii")


def write_document(doc: dict, path) -> None:
    Path(path).write_bytes(document_bytes(doc))


def load_document(path) -> dict:
    """Read and structurally validate a solution document."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON: {exc}") from None
    _validate_document(doc, str(path))
    return doc


def _validate_document(doc, path: str) -> None:
    def fail(msg: str):
        raise ValueError(f"{path}: {msg}")

    if not isinstance(doc, dict):
        fail("document must be a JSON object")
    for key in ("schema_version", "n", "m", "method", "degeneracy_tol", "solutions", "provenance"):
        if key not in doc:
            fail(f"missing field {key!r}")
    if doc["schema_version"] != SCHEMA_VERSION:
        fail(f"unsupported schema_version {doc['schema_version']!r}")
    n, m = doc["n"], doc["m"]
    if not (isinstance(n, int) and isinstance(m, int) and 1 <= m < n):
        fail(f"invalid sizes n={n!r} m={m!r}")
    if doc["method"] not in _METHODS:
        fail(f"invalid method {doc['method']!r}")
    tol = doc["degeneracy_tol"]
    if tol is not None and not (isinstance(tol, (int, float)) and tol > 0):
        fail(f"degeneracy_tol must be positive or null, got {tol!r}")
    sols = doc["solutions"]
    if not isinstance(sols, list) or not sols:
        fail("solutions must be a nonempty list")
    for rank, rec in enumerate(sols):
        if not isinstance(rec, dict):
            fail(f"solution {rank} must be an object")
        if rec.get("rank") != rank:
            fail(f"solution ranks must be 0-based and contiguous; position {rank} has rank {rec.get('rank')!r}")
        removed = rec.get("removed")
        if (not isinstance(removed, list) or len(removed) != m
                or any(not isinstance(i, int) for i in removed)
                or any(b <= a for a, b in zip(removed, removed[1:]))
                or removed[0] < 0 or removed[-1] >= n):
            fail(f"solution {rank} has invalid removed list {removed!r}")
        energy = rec.get("energy")
        if not isinstance(energy, (int, float)) or isinstance(energy, bool):
            fail(f"solution {rank} has non-numeric energy {energy!r}")
    if not isinstance(doc["provenance"], dict):
        fail("provenance must be an object")
    if "hessian_path" not in doc["provenance"] and "gradients_path" not in doc["provenance"]:
        fail("provenance must name its input file")
    if doc["method"] == "anneal" and "seed" not in doc["provenance"]:
        fail("heuristic documents must record the seed")


def spectrum_from_document(doc: dict) -> Spectrum:
    """Rebuild the Spectrum a document describes, revalidating canonical order."""
    n = doc["n"]
    solutions = tuple(
        Solution(Configuration(n, tuple(rec["removed"])), float(rec["energy"]))
        for rec in doc["solutions"]
    )
    return Spectrum(solutions, doc["degeneracy_tol"])


def schema_path() -> Path:
    """Location of the JSON schema file shipped with the package."""
    return Path(str(resources.files("blockspectrum") / "schemas" / "solution_document.schema.json"))
