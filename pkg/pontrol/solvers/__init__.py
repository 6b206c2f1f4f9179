"""Solution strategies for the quarantine optimal control problems."""

from .compare import CrossValidation, compare_reports, cross_validate, solve
from .fbsm import solve_fbsm
from .gradient import solve_projected_gradient
from .report import ControlEvaluation, IterationRecord, SolveReport, evaluate_control
from .settings import SolverKind, SweepSettings

__all__ = [
    "ControlEvaluation",
    "CrossValidation",
    "IterationRecord",
    "SolveReport",
    "SolverKind",
    "SweepSettings",
    "compare_reports",
    "cross_validate",
    "evaluate_control",
    "solve",
    "solve_fbsm",
    "solve_projected_gradient",
]
