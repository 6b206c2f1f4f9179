"""Solver results and the evaluation of a single control."""

from __future__ import annotations

# Standard library imports
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional, Tuple

# Third-party imports
import numpy as np

from ..integrators import AdjointTrajectory, ControlTrajectory, StateTrajectory
from ..ocp import ControlSynthesis, OcpProblem, control_indicators, objective
from ..verification import (
    ProbeReport,
    probe_lemma1,
    probe_lemma3,
    probe_terminal_control,
)
from .settings import SolverKind


@dataclass(frozen=True, eq=False)
class ControlEvaluation:
    """A control with its states, costates, synthesized control and cost."""

    control: ControlTrajectory
    states: StateTrajectory
    adjoints: AdjointTrajectory
    synthesis: ControlSynthesis
    objective: float

    @property
    def residual(self) -> float:
        """Sup-norm distance between the control and its resynthesis."""
        return float(np.max(np.abs(self.synthesis.control - self.control.values)))


def evaluate_control(
    problem: OcpProblem,
    u: ControlTrajectory,
    states: Optional[StateTrajectory] = None,
) -> ControlEvaluation:
    """Run the forward and backward passes for ``u`` and resynthesize.

    Args:
        problem: Problem definition.
        u: Control on the problem grid.
        states: Forward solution for ``u`` if already available.
    """
    forward = problem.simulate(u) if states is None else states
    adjoints = problem.costates(forward, u)
    synthesis = control_indicators(problem, forward, adjoints)
    cost = objective(forward, u, problem.weights, problem.quadrature)
    return ControlEvaluation(u, forward, adjoints, synthesis, cost)


@dataclass(frozen=True)
class IterationRecord:
    """One line of solver history."""

    iteration: int
    residual: float
    objective: float
    step: float


@dataclass(frozen=True, eq=False)
class SolveReport:
    """Result of one optimal control solve.

    Attributes:
        solver: Strategy that produced the result.
        problem: The solved problem.
        u_star: Final control.
        states: States under ``u_star``.
        adjoints: Costates under ``u_star``.
        synthesis: Indicator (and Model 1 coefficients) along the solution.
        q_star: Cost of ``u_star``.
        iterations: Number of control updates performed.
        converged: Whether the stopping criteria were met.
        stationarity_residual: ``max |u_star - resynthesized control|``.
        tolerance: Tolerance the residual was compared against.
        history: Per-iteration residual and cost.
        lemma_probes: Qualitative checks on the final solution.
        stalled: True if a line search could not decrease the cost.
        elapsed: Wall-clock seconds.
    """

    solver: SolverKind
    problem: OcpProblem
    u_star: ControlTrajectory
    states: StateTrajectory
    adjoints: AdjointTrajectory
    synthesis: ControlSynthesis
    q_star: float
    iterations: int
    converged: bool
    stationarity_residual: float
    tolerance: float
    history: Tuple[IterationRecord, ...] = ()
    lemma_probes: Dict[str, ProbeReport] = field(default_factory=dict)
    stalled: bool = False
    elapsed: float = 0.0

    @property
    def infected_terminal(self) -> float:
        """Infected fraction ``i(T) + j(T)`` under ``u_star``."""
        return float(self.states.infected()[-1])

    @property
    def probes_passed(self) -> bool:
        """True if every attached probe passed."""
        return all(report.passed for report in self.lemma_probes.values())

    def summary(self) -> Dict[str, Any]:
        """Flat mapping of the scalar results."""
        return {
            "solver": self.solver.value,
            "model": int(self.problem.kind.value),
            "horizon": self.problem.grid.horizon,
            "steps": self.problem.grid.n_steps,
            "q_star": self.q_star,
            "infected_terminal": self.infected_terminal,
            "u_terminal": float(self.u_star.values[-1]),
            "iterations": self.iterations,
            "converged": self.converged,
            "stalled": self.stalled,
            "stationarity_residual": self.stationarity_residual,
            "tolerance": self.tolerance,
            "elapsed_seconds": self.elapsed,
        }


def build_report(
    solver: SolverKind,
    problem: OcpProblem,
    evaluation: ControlEvaluation,
    *,
    iterations: int,
    converged: bool,
    tolerance: float,
    history: Tuple[IterationRecord, ...],
    stalled: bool = False,
    elapsed: float = 0.0,
) -> SolveReport:
    """Assemble a :class:`SolveReport` and attach the solution probes."""
    report = SolveReport(
        solver=solver,
        problem=problem,
        u_star=evaluation.control,
        states=evaluation.states,
        adjoints=evaluation.adjoints,
        synthesis=evaluation.synthesis,
        q_star=evaluation.objective,
        iterations=iterations,
        converged=converged,
        stationarity_residual=evaluation.residual,
        tolerance=tolerance,
        history=history,
        stalled=stalled,
        elapsed=elapsed,
    )
    probes = (
        probe_lemma1(report.states),
        probe_terminal_control(report),
        probe_lemma3(report),
    )
    return replace(report, lemma_probes={probe.name: probe for probe in probes})
