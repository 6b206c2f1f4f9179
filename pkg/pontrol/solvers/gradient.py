"""Projected gradient descent on the node values of the control."""

from __future__ import annotations

# Standard library imports
import logging
import time
from typing import List, Optional, Tuple

# Third-party imports
import numpy as np

from ..integrators import ControlTrajectory
from ..ocp import OcpProblem, objective, objective_gradient, quadrature_weights
from .report import (
    ControlEvaluation,
    IterationRecord,
    SolveReport,
    build_report,
    evaluate_control,
)
from .settings import SolverKind, SweepSettings

logger = logging.getLogger(__name__)


def _line_search(
    problem: OcpProblem,
    evaluation: ControlEvaluation,
    gradient: np.ndarray,
    weights: np.ndarray,
    first_step: float,
    settings: SweepSettings,
) -> Optional[Tuple[ControlEvaluation, float]]:
    """Armijo backtracking along the projection arc; ``None`` if no step works."""
    u = evaluation.control.values
    step = first_step
    for _ in range(settings.max_backtracks):
        candidate = np.clip(u - step * gradient, 0.0, problem.bounds.u_max)
        direction = candidate - u
        slope = float(np.sum(weights * gradient * direction))
        if slope < 0.0:
            control = ControlTrajectory(problem.grid, candidate)
            states = problem.simulate(control)
            cost = objective(states, control, problem.weights, problem.quadrature)
            if cost <= evaluation.objective + settings.armijo * slope:
                return evaluate_control(problem, control, states), step
        step *= settings.backtrack
    return None


def _first_step(
    weights: np.ndarray,
    previous: Optional[Tuple[np.ndarray, np.ndarray]],
    evaluation: ControlEvaluation,
    gradient: np.ndarray,
    last_step: float,
    max_step: float,
) -> float:
    """Barzilai-Borwein step from the last accepted move, capped at ``max_step``.

    Falls back to twice the last accepted step when the curvature estimate is
    not positive.
    """
    fallback = min(2.0 * last_step, max_step)
    if previous is None:
        return fallback
    du = evaluation.control.values - previous[0]
    dg = gradient - previous[1]
    curvature = float(np.sum(weights * du * dg))
    if curvature <= 0.0:
        return fallback
    return min(float(np.sum(weights * du * du)) / curvature, max_step)


def solve_projected_gradient(
    problem: OcpProblem, settings: Optional[SweepSettings] = None
) -> SolveReport:
    """Minimize the discretized cost by projected gradient descent.

    The gradient is the costate expression of
    :func:`pontrol.ocp.objective_gradient`; directional derivatives use the
    trapezoid inner product. Each trial step is the Barzilai-Borwein step of
    the last move, capped at ``1 / alpha3``, and Armijo backtracking shortens
    it until the cost decreases. The iteration stops when the stationarity
    residual ``max |u - resynthesized u|`` is at most ``tol_u``, the same
    criterion the sweep uses. When no step decreases the cost the solve ends
    with ``stalled=True`` and counts as converged only if that residual is
    already within tolerance.

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
    weights = quadrature_weights(problem.grid)
    max_step = 1.0 / problem.weights.alpha3

    evaluation = evaluate_control(
        problem, ControlTrajectory.constant(problem.grid, initial)
    )
    step = max_step
    previous: Optional[Tuple[np.ndarray, np.ndarray]] = None
    history: List[IterationRecord] = []
    converged = False
    stalled = False
    iteration = 0

    while True:
        gradient = objective_gradient(
            problem, evaluation.control, evaluation.states, evaluation.adjoints
        )
        residual = evaluation.residual
        history.append(IterationRecord(iteration, residual, evaluation.objective, step))
        logger.debug(
            "pgrad iteration %d: residual %.3e, Q %.12e, step %.4g",
            iteration,
            residual,
            evaluation.objective,
            step,
        )
        if residual <= config.tol_u:
            converged = True
            break
        if iteration >= config.max_iters:
            break

        first = _first_step(weights, previous, evaluation, gradient, step, max_step)
        found = _line_search(problem, evaluation, gradient, weights, first, config)
        if found is None:
            stalled = True
            logger.warning(
                "pgrad line search stalled at iteration %d (residual %.3e)",
                iteration,
                residual,
            )
            break
        previous = (evaluation.control.values, gradient)
        evaluation, step = found
        iteration += 1

    elapsed = time.perf_counter() - started
    logger.info(
        "pgrad %s after %d iterations (residual %.3e, Q %.12e)",
        "converged" if converged else "stopped",
        iteration,
        history[-1].residual,
        evaluation.objective,
    )
    return build_report(
        SolverKind.PGRAD,
        problem,
        evaluation,
        iterations=iteration,
        converged=converged,
        tolerance=config.tol_u,
        history=tuple(history),
        stalled=stalled,
        elapsed=elapsed,
    )
