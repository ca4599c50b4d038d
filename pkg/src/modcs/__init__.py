"""Recoverability analysis for modified compressive sensing with a partially known support."""

from modcs.numkit import IndexSet, SeededStream, SignPattern, columns, mat_vec, rank
from modcs.lp import LinearProgram, LpSolution, LpStatus, solve, enumerate_optimal_vertices
from modcs.recovery import (
    RecoveryProblem,
    recovered,
    solve_basis_pursuit,
    solve_modified_cs,
)
from modcs.snc import SncInstance, SncReport, build_subset_lp, check_by_solving, check_snc
from modcs.probability import (
    CheckerKind,
    ProbabilityEstimate,
    Quad,
    Scenario,
    enumerate_quads,
    exact_probability,
    mc_probability,
    quad_space_size,
    sample_quad,
)

__version__ = "0.1.0"

__all__ = [
    "CheckerKind",
    "IndexSet",
    "LinearProgram",
    "LpSolution",
    "LpStatus",
    "ProbabilityEstimate",
    "Quad",
    "RecoveryProblem",
    "Scenario",
    "SeededStream",
    "SignPattern",
    "SncInstance",
    "SncReport",
    "build_subset_lp",
    "check_by_solving",
    "check_snc",
    "columns",
    "enumerate_optimal_vertices",
    "enumerate_quads",
    "exact_probability",
    "mat_vec",
    "mc_probability",
    "quad_space_size",
    "rank",
    "recovered",
    "sample_quad",
    "solve",
    "solve_basis_pursuit",
    "solve_modified_cs",
]
