"""Exact, heuristic and MILP-based solvers."""

from .model import MilpModel, MilpSolution, ModelError, build_model, export_lp, solve_lp_file, solve_milp
from .search import (
    SolveResult,
    SolverError,
    brute_force,
    greedy_control_set,
    solve_exact,
)

__all__ = [
    "MilpModel",
    "MilpSolution",
    "ModelError",
    "SolveResult",
    "SolverError",
    "brute_force",
    "build_model",
    "export_lp",
    "greedy_control_set",
    "solve_exact",
    "solve_lp_file",
    "solve_milp",
]
