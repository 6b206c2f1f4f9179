"""Cross-validation of the sweep and gradient solvers."""

from __future__ import annotations

# Standard library imports
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

# Third-party imports
import numpy as np

from ..ocp import OcpProblem
from .fbsm import solve_fbsm
from .gradient import solve_projected_gradient
from .report import SolveReport
from .settings import SolverKind, SweepSettings

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CrossValidation:
    """Comparison of two solutions of the same problem.

    Attributes:
        fbsm: Forward-backward sweep result.
        pgrad: Projected gradient result.
        delta_q_relative: ``|Q_fbsm - Q_pgrad| / max(|Q_fbsm|, |Q_pgrad|)``.
        delta_u_sup: ``max |u_fbsm - u_pgrad|`` over the nodes.
        fbsm_residuals: Node-wise ``|u - u_hat|`` of the sweep solution.
        pgrad_residuals: Node-wise ``|u - u_hat|`` of the gradient solution.
    """

    fbsm: SolveReport
    pgrad: SolveReport
    delta_q_relative: float
    delta_u_sup: float
    fbsm_residuals: np.ndarray
    pgrad_residuals: np.ndarray

    @property
    def complete(self) -> bool:
        """True when both solvers converged."""
        return self.fbsm.converged and self.pgrad.converged

    def summary(self) -> Dict[str, Any]:
        """Flat mapping of the comparison."""
        return {
            "q_fbsm": self.fbsm.q_star,
            "q_pgrad": self.pgrad.q_star,
            "delta_q_relative": self.delta_q_relative,
            "delta_u_sup": self.delta_u_sup,
            "fbsm_converged": self.fbsm.converged,
            "pgrad_converged": self.pgrad.converged,
            "complete": self.complete,
        }


def _node_residuals(report: SolveReport) -> np.ndarray:
    return np.abs(report.u_star.values - report.synthesis.control)


def compare_reports(fbsm: SolveReport, pgrad: SolveReport) -> CrossValidation:
    """Build a :class:`CrossValidation` from two existing solutions."""
    scale = max(abs(fbsm.q_star), abs(pgrad.q_star))
    delta_q = abs(fbsm.q_star - pgrad.q_star) / scale if scale > 0.0 else 0.0
    delta_u = float(np.max(np.abs(fbsm.u_star.values - pgrad.u_star.values)))
    result = CrossValidation(
        fbsm=fbsm,
        pgrad=pgrad,
        delta_q_relative=delta_q,
        delta_u_sup=delta_u,
        fbsm_residuals=_node_residuals(fbsm),
        pgrad_residuals=_node_residuals(pgrad),
    )
    if not result.complete:
        logger.warning(
            "Cross-validation is partial: fbsm converged=%s, pgrad converged=%s",
            fbsm.converged,
            pgrad.converged,
        )
    return result


def cross_validate(
    problem: OcpProblem, settings: Optional[SweepSettings] = None
) -> CrossValidation:
    """Solve with both strategies and compare costs and controls."""
    return compare_reports(
        solve_fbsm(problem, settings), solve_projected_gradient(problem, settings)
    )


def solve(
    problem: OcpProblem,
    settings: Optional[SweepSettings] = None,
    solver: SolverKind = SolverKind.FBSM,
) -> SolveReport:
    """Dispatch to the solver named by ``solver``."""
    if solver is SolverKind.PGRAD:
        return solve_projected_gradient(problem, settings)
    return solve_fbsm(problem, settings)
