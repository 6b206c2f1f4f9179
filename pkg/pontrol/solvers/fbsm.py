"""Forward-backward sweep for the optimal control problems.

Each sweep integrates the states forward under the current control, the
costates backward, resynthesizes the pointwise maximizer of the Hamiltonian
and moves the control part of the way towards it.
"""

from __future__ import annotations

# Standard library imports
import logging
import math
import time
from typing import Final, List, Optional

# Third-party imports
import numpy as np

from ..integrators import ControlTrajectory
from ..ocp import OcpProblem
from .report import IterationRecord, SolveReport, build_report, evaluate_control
from .settings import SolverKind, SweepSettings

logger = logging.getLogger(__name__)

# Below this absolute level objective changes are round-off.
OBJECTIVE_FLOOR: Final[float] = 1e-15


def objective_settled(current: float, previous: Optional[float], tol_q: float) -> bool:
    """Relative change test on the cost, tolerant of costs that vanish."""
    if previous is None:
        return False
    change = abs(current - previous)
    scale = max(abs(current), abs(previous))
    return change <= tol_q * scale or change <= OBJECTIVE_FLOOR


def solve_fbsm(
    problem: OcpProblem, settings: Optional[SweepSettings] = None
) -> SolveReport:
    """Solve the problem with the relaxed forward-backward sweep.

    The iteration stops when the stationarity residual ``max |u_hat - u|`` is
    at most ``tol_u`` and the relative cost change is at most ``tol_q``. With
    ``adaptive`` enabled the relaxation is halved whenever the residual grows.
    Running out of iterations is reported through ``converged=False``.

    Args:
        problem: Problem to solve.
        settings: Iteration settings (defaults when omitted).

    Returns:
        The final control with its trajectories and diagnostics.

    Raises:
        IntegrationError: If a forward or backward pass fails.
        SingularityError: If n reaches the division floor (Model 2).
    """
    config = settings or SweepSettings()
    started = time.perf_counter()
    u_max = problem.bounds.u_max
    initial = u_max
    if config.initial_guess is not None:
        initial = min(config.initial_guess, u_max)
    floor = min(config.min_relaxation, config.relaxation)

    evaluation = evaluate_control(
        problem, ControlTrajectory.constant(problem.grid, initial)
    )
    theta = config.relaxation
    previous_residual = math.inf
    previous_objective: Optional[float] = None
    history: List[IterationRecord] = []
    converged = False
    iteration = 0

    while True:
        residual = evaluation.residual
        history.append(
            IterationRecord(iteration, residual, evaluation.objective, theta)
        )
        logger.debug(
            "fbsm iteration %d: residual %.3e, Q %.12e, theta %.4g",
            iteration,
            residual,
            evaluation.objective,
            theta,
        )
        if residual <= config.tol_u and objective_settled(
            evaluation.objective, previous_objective, config.tol_q
        ):
            converged = True
            break
        if iteration >= config.max_iters:
            break

        if config.adaptive and residual > previous_residual:
            theta = max(0.5 * theta, floor)
        previous_residual = residual
        previous_objective = evaluation.objective

        current = evaluation.control.values
        target = evaluation.synthesis.control
        updated = np.clip((1.0 - theta) * current + theta * target, 0.0, u_max)
        evaluation = evaluate_control(problem, ControlTrajectory(problem.grid, updated))
        iteration += 1

    if converged:
        # Adopt the resynthesized control when it is at least as stationary.
        polished = evaluate_control(
            problem, ControlTrajectory(problem.grid, evaluation.synthesis.control)
        )
        if polished.residual <= evaluation.residual:
            evaluation = polished

    elapsed = time.perf_counter() - started
    logger.info(
        "fbsm %s after %d iterations (residual %.3e, Q %.12e)",
        "converged" if converged else "stopped",
        iteration,
        evaluation.residual,
        evaluation.objective,
    )
    return build_report(
        SolverKind.FBSM,
        problem,
        evaluation,
        iterations=iteration,
        converged=converged,
        tolerance=config.tol_u,
        history=tuple(history),
        elapsed=elapsed,
    )
