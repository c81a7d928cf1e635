"""Cardinality-constrained binary quadratic solvers for block-removal ranking.

Given per-sample loss gradients of block gates, the package builds the
quadratic proxy for the loss change under block removal, solves
min x^T H x subject to sum(x) = M exactly (full enumeration with top-K
spectrum) or approximately (swap-move annealing), reformulates the problem as
a penalized QUBO / fixed-magnetization spin model for external solvers, and
analyzes low-energy spectra for structurally distinct candidates (the CBO
rank labels: CBO: 0 is the ground state, CBO: r the r-th excited state).
"""

from .analysis import FrequencyReport, pairwise_distance, removal_frequency, select_diverse
from .anneal import AnnealConfig, anneal, default_config, local_search
from .core import (Configuration, Hessian, Solution, Spectrum, energies_degenerate, energy,
                   load_hessian, save_hessian, sort_solutions, swap_delta)
from .document import (build_document, document_bytes, load_document, rank_label, schema_path,
                       spectrum_from_document, write_document)
from .exact import (ExactSolveRequest, count_feasible, drift_audit, enumerate_incremental,
                    revolving_door, solve_topk)
from .formats import FormatError
from .gradients import (GradientMatrix, build_hessian, gradient_diagnostic, load_gradients,
                        save_gradients)
from .qubo import (IsingInstance, QuboInstance, default_penalty, export_ising, export_qubo,
                   load_ising, load_qubo, spins, to_ising, to_qubo)

__version__ = "0.1.0"

__all__ = [
    "AnnealConfig", "Configuration", "ExactSolveRequest", "FormatError", "FrequencyReport",
    "GradientMatrix", "Hessian", "IsingInstance", "QuboInstance", "Solution", "Spectrum",
    "anneal", "build_document", "build_hessian", "count_feasible", "default_config",
    "default_penalty", "document_bytes", "drift_audit", "energies_degenerate", "energy",
    "enumerate_incremental", "export_ising", "export_qubo", "gradient_diagnostic",
    "load_document", "load_gradients", "load_hessian", "load_ising", "load_qubo",
    "local_search", "pairwise_distance", "rank_label", "removal_frequency", "revolving_door",
    "save_gradients", "save_hessian", "schema_path", "select_diverse", "solve_topk",
    "sort_solutions", "spectrum_from_document", "spins", "swap_delta", "to_ising", "to_qubo",
    "write_document",
]
