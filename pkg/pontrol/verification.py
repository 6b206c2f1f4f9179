"""Runtime probes for the qualitative properties of the models and optima.

Every probe returns an immutable :class:`ProbeReport`. A probe passes exactly
when it recorded no violations; probes whose hypothesis never occurred (for
example no node with ``A < 0``) pass with ``vacuous=True``.
"""

from __future__ import annotations

# Standard library imports
import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Dict, Final, List, Optional, Sequence, Tuple

# Third-party imports
import numpy as np

from .integrators import (
    REFINEMENT_ORDER_THRESHOLD,
    ControlTrajectory,
    StateTrajectory,
    step_refinement_check,
)
from .models import ControlBounds, EpidemicParams, ModelKind, ObjectiveWeights
from .ocp import (
    A_ZERO_TOLERANCE,
    HamiltonianCoeffs,
    OcpProblem,
    objective_gradient,
    quadrature_weights,
)
from .reproduction import REFERENCE_R0_TABLE, r0_controlled, reference_params

if TYPE_CHECKING:
    from .solvers.report import SolveReport

logger = logging.getLogger(__name__)

STATE_TOLERANCE: Final[float] = 1e-9
N_INCREASE_TOLERANCE: Final[float] = 1e-12
CONVEXITY_TOLERANCE: Final[float] = 1e-12
GRADIENT_TOLERANCE: Final[float] = 1e-4
GRADIENT_STEP: Final[float] = 1e-6
CONTINUITY_SLACK: Final[float] = 0.1
MAX_DETAILS: Final[int] = 5


@dataclass(frozen=True)
class ProbeReport:
    """Outcome of one probe.

    Attributes:
        name: Probe identifier.
        trials: Number of checks performed.
        violations: Number of failed checks.
        worst_residual: Largest violation margin (or largest residual) seen.
        vacuous: True when the probe had nothing to check.
        details: Short descriptions of the first violations.
    """

    name: str
    trials: int
    violations: int
    worst_residual: float
    vacuous: bool = False
    details: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        """True exactly when no violation was recorded."""
        return self.violations == 0

    def to_dict(self) -> Dict[str, Any]:
        """Plain mapping for TOML and CSV emission."""
        return {
            "name": self.name,
            "trials": self.trials,
            "violations": self.violations,
            "worst_residual": self.worst_residual,
            "vacuous": self.vacuous,
            "passed": self.passed,
            "details": list(self.details),
        }


@dataclass(frozen=True)
class ProbeSuite:
    """Collection of probe reports."""

    reports: Tuple[ProbeReport, ...]

    @property
    def passed(self) -> bool:
        """True if every probe passed (vacuous passes count)."""
        return all(report.passed for report in self.reports)

    def failures(self) -> List[ProbeReport]:
        """Reports with at least one violation."""
        return [report for report in self.reports if not report.passed]


def _vacuous(name: str, reason: str) -> ProbeReport:
    return ProbeReport(name, 0, 0, 0.0, vacuous=True, details=(reason,))


def probe_lemma1(
    trajectory: StateTrajectory, name: str = "positivity"
) -> ProbeReport:
    """Check positivity, boundedness, monotone n and conservation at every node.

    A node counts as one violation if any compartment is below -1e-9 or above
    1 + 1e-9, if n is not positive, if n increased since the previous node, or
    if ``|s + e + i + j + r - n|`` exceeds 1e-9.
    """
    values = trajectory.values
    n = trajectory.n
    conservation = trajectory.conservation_residual()

    negative = values.min(axis=1) < -STATE_TOLERANCE
    unbounded = values.max(axis=1) > 1.0 + STATE_TOLERANCE
    dead = n <= 0.0
    increasing = np.zeros(n.shape, dtype=bool)
    increasing[1:] = np.diff(n) > N_INCREASE_TOLERANCE
    broken = conservation > STATE_TOLERANCE

    bad = negative | unbounded | dead | increasing | broken
    worst = max(float(conservation.max()), max(0.0, -float(values.min())))
    details = tuple(
        f"node {k} (t={trajectory.grid.nodes[k]:.6g}): "
        f"min={values[k].min():.3e}, conservation={conservation[k]:.3e}"
        for k in np.flatnonzero(bad)[:MAX_DETAILS]
    )
    return ProbeReport(name, int(n.size), int(bad.sum()), worst, details=details)


def probe_conservation(
    trajectory: StateTrajectory, name: str = "conservation"
) -> ProbeReport:
    """Check ``|s + e + i + j + r - n| <= 1e-9`` at every node."""
    residual = trajectory.conservation_residual()
    violations = int((residual > STATE_TOLERANCE).sum())
    return ProbeReport(name, int(residual.size), violations, float(residual.max()))


def _lemma3_from_arrays(
    a: np.ndarray, b: np.ndarray, bounds: ControlBounds, name: str
) -> ProbeReport:
    negative = a < -A_ZERO_TOLERANCE
    trials = int(negative.sum())
    if trials == 0:
        return _vacuous(name, "A(t) >= 0 at every node")
    lam = b[negative] / (2.0 * a[negative])
    threshold = 0.5 * bounds.u_max
    failed = ~(lam > threshold)
    worst = float(np.max(np.maximum(threshold - lam, 0.0)))
    details = tuple(
        f"A={a_val:.3e}, lambda={lam_val:.6g} <= {threshold:.6g}"
        for a_val, lam_val in zip(a[negative][failed][:MAX_DETAILS], lam[failed])
    )
    return ProbeReport(name, trials, int(failed.sum()), worst, details=details)


def check_lemma3(
    coeffs: Sequence[HamiltonianCoeffs],
    bounds: ControlBounds,
    name: str = "negative-curvature",
) -> ProbeReport:
    """Wherever ``A < 0`` require ``lambda = B / (2A) > 0.5 * u_max``.

    Examples:
        >>> report = check_lemma3([HamiltonianCoeffs(-0.1, -0.2)], ControlBounds(0.9))
        >>> report.passed
        True
    """
    a = np.array([c.A for c in coeffs], dtype=float)
    b = np.array([c.B for c in coeffs], dtype=float)
    return _lemma3_from_arrays(a, b, bounds, name)


def probe_lemma3(report: SolveReport) -> ProbeReport:
    """Apply :func:`check_lemma3` along the nodes of a Model 1 solution."""
    name = "negative-curvature"
    synthesis = report.synthesis
    if report.problem.kind is not ModelKind.MODEL1 or synthesis.A is None:
        return _vacuous(name, "only meaningful for Model-1")
    assert synthesis.B is not None
    return _lemma3_from_arrays(synthesis.A, synthesis.B, report.problem.bounds, name)


def probe_terminal_control(report: SolveReport) -> ProbeReport:
    """Check ``u*(T) > 0`` whenever alpha1 is positive."""
    name = "terminal-control"
    if report.problem.weights.alpha1 <= 0.0:
        return _vacuous(name, "alpha1 = 0")
    final = float(report.u_star.values[-1])
    if final > 0.0:
        return ProbeReport(name, 1, 0, 0.0)
    return ProbeReport(name, 1, 1, -final, details=(f"u*(T) = {final:.3e}",))


def probe_stationarity(report: SolveReport) -> ProbeReport:
    """Check that resynthesis reproduces ``u*`` within the solver tolerance."""
    residual = report.stationarity_residual
    violations = 0 if residual <= report.tolerance else 1
    return ProbeReport("stationarity", 1, violations, residual)


def probe_optimality(report: SolveReport, rtol: float = 1e-9) -> ProbeReport:
    """Check ``Q(u*) <= min(Q(0), Q(u_max))``."""
    problem = report.problem
    rivals = {
        "u=0": problem.cost(problem.constant_control(0.0)),
        "u=u_max": problem.cost(problem.constant_control(problem.bounds.u_max)),
    }
    best = min(rivals.values())
    excess = report.q_star - best
    allowed = rtol * max(abs(best), abs(report.q_star))
    if excess <= allowed:
        return ProbeReport("optimality", len(rivals), 0, max(excess, 0.0))
    details = tuple(
        f"Q*={report.q_star:.9e} > Q({k})={v:.9e}" for k, v in rivals.items()
    )
    return ProbeReport("optimality", len(rivals), 1, excess, details=details)


def probe_continuity(
    coarse: ControlTrajectory,
    fine: ControlTrajectory,
    slack: float = CONTINUITY_SLACK,
) -> ProbeReport:
    """Check that the largest inter-node jump at least halves under refinement.

    Args:
        coarse: Optimal control on a grid with n steps.
        fine: Optimal control of the same problem on 2n steps.
        slack: Relative allowance on the factor one half.
    """
    name = "continuity"
    coarse_jump = coarse.max_jump()
    fine_jump = fine.max_jump()
    if coarse_jump == 0.0:
        violations = 0 if fine_jump == 0.0 else 1
        return ProbeReport(name, 1, violations, fine_jump)
    ratio = fine_jump / coarse_jump
    if ratio <= 0.5 * (1.0 + slack):
        return ProbeReport(name, 1, 0, ratio)
    return ProbeReport(
        name,
        1,
        1,
        ratio,
        details=(f"jump {coarse_jump:.3e} -> {fine_jump:.3e} (ratio {ratio:.3f})",),
    )


def probe_refinement(
    problem: OcpProblem,
    u: Optional[ControlTrajectory] = None,
    threshold: float = REFINEMENT_ORDER_THRESHOLD,
) -> ProbeReport:
    """Observed RK4 order on n, 2n and 4n steps must reach ``threshold``."""
    result = step_refinement_check(
        problem.kind, problem.params, problem.ic, u, problem.grid
    )
    shortfall = max(threshold - result.order, 0.0)
    detail = (
        f"errors {result.coarse_error:.3e}, {result.fine_error:.3e}; "
        f"order {result.order:.3f}"
    )
    return ProbeReport(
        "refinement-order",
        1,
        0 if result.passed(threshold) else 1,
        shortfall,
        details=(detail,),
    )


def probe_r0_threshold(bounds: Optional[ControlBounds] = None) -> ProbeReport:
    """Constant quarantine at ``u_max`` brings both ratios below 1."""
    limits = bounds or ControlBounds()
    base = reference_params()
    values = []
    details = []
    for beta1, beta2 in REFERENCE_R0_TABLE.values():
        params = base.with_betas(beta1, beta2)
        for kind in ModelKind:
            ratio = r0_controlled(kind, params, limits.u_max)
            values.append(ratio)
            if ratio >= 1.0:
                details.append(f"{kind.label}, beta1={beta1}: R={ratio:.4f}")
    return ProbeReport(
        "controlled-r0",
        len(values),
        len(details),
        max(values),
        details=tuple(details[:MAX_DETAILS]),
    )


def convexity_midpoint(
    m: np.ndarray,
    ell: np.ndarray,
    w_hat: np.ndarray,
    w_tilde: np.ndarray,
    lam: np.ndarray,
) -> np.ndarray:
    """Solve ``f(w) = lam f(w_hat) + (1 - lam) f(w_tilde)``, ``f(w) = m w^2 + ell w``.

    Returns the non-negative root, computed in the cancellation-free form
    ``2c / (ell + sqrt(ell^2 + 4 m c))``.
    """
    target = lam * (m * w_hat**2 + ell * w_hat) + (1.0 - lam) * (
        m * w_tilde**2 + ell * w_tilde
    )
    denominator = ell + np.sqrt(ell * ell + 4.0 * m * target)
    safe = np.where(denominator > 0.0, denominator, 1.0)
    return np.where(denominator > 0.0, 2.0 * target / safe, 0.0)


def probe_convexity(
    trials: int = 10_000,
    seed: int = 0,
    bounds: Optional[ControlBounds] = None,
    weights: Optional[ObjectiveWeights] = None,
    params: Optional[EpidemicParams] = None,
) -> ProbeReport:
    """Random check that the attainable set of the reduced problem is convex.

    For random positive fractions and contact levels ``w = 1 - u`` in
    ``[w_min, 1]`` the infection rate ``f(w) = M w^2 + L w`` with
    ``M = beta1 s i`` and ``L = beta2 s j`` is interpolated at weight ``lam``.
    The interpolating contact level must stay admissible, must dominate the
    convex combination of contact levels, and must not raise the control cost
    ``K (1 - w)^2`` above the combination of costs.

    Raises:
        ValueError: If ``trials`` is less than 1.
    """
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    limits = bounds or ControlBounds()
    costs = weights or ObjectiveWeights()
    rates = params or reference_params()
    rng = np.random.default_rng(seed)

    # 1 - random() lies in (0, 1]
    s, i, j = 1.0 - rng.random((3, trials))
    w_min = limits.w_min
    w_hat = rng.uniform(w_min, 1.0, trials)
    w_tilde = rng.uniform(w_min, 1.0, trials)
    lam = rng.random(trials)

    m = rates.beta1 * s * i
    ell = rates.beta2 * s * j
    k = 0.5 * costs.alpha3
    w_bar = convexity_midpoint(m, ell, w_hat, w_tilde, lam)

    tol = CONVEXITY_TOLERANCE
    outside = np.maximum(w_min - w_bar, w_bar - 1.0)
    dominance = lam * w_hat + (1.0 - lam) * w_tilde - w_bar
    cost_gap = (
        k * (1.0 - w_bar) ** 2
        - lam * k * (1.0 - w_hat) ** 2
        - (1.0 - lam) * k * (1.0 - w_tilde) ** 2
    ) / k

    failed = (outside > tol) | (dominance > tol) | (cost_gap > tol)
    worst = float(
        np.max(np.maximum.reduce([outside, dominance, cost_gap, np.zeros(trials)]))
    )
    details = tuple(
        f"trial {t}: w_hat={w_hat[t]:.6g}, w_tilde={w_tilde[t]:.6g}, "
        f"lam={lam[t]:.6g}, w_bar={w_bar[t]:.6g}"
        for t in np.flatnonzero(failed)[:MAX_DETAILS]
    )
    logger.debug("Convexity probe: %d trials, %d violations", trials, int(failed.sum()))
    return ProbeReport("convexity", trials, int(failed.sum()), worst, details=details)


def _random_interior_control(
    problem: OcpProblem, rng: np.random.Generator
) -> ControlTrajectory:
    t = problem.grid.nodes / problem.grid.horizon
    u_max = problem.bounds.u_max
    frequency = int(rng.integers(1, 4))
    phase = rng.uniform(0.0, 2.0 * np.pi)
    values = u_max * (0.5 + 0.3 * np.sin(2.0 * np.pi * frequency * t + phase))
    return ControlTrajectory(problem.grid, values)


def _bump(nodes: np.ndarray, centre: float, half_width: float) -> np.ndarray:
    x = (nodes - centre) / half_width
    return np.where(np.abs(x) < 1.0, np.cos(0.5 * np.pi * x) ** 2, 0.0)


def probe_gradient(
    problem: OcpProblem,
    u: Optional[ControlTrajectory] = None,
    directions: int = 20,
    seed: int = 0,
    step: float = GRADIENT_STEP,
    tolerance: float = GRADIENT_TOLERANCE,
) -> ProbeReport:
    """Compare the costate gradient with central finite differences of the cost.

    Each direction is a smooth bump centred on a random node, zeroed wherever
    the perturbed control would leave ``[0, u_max]``. The error of a direction
    is measured relative to ``sum(w |g| |d|)``, the size of the directional
    derivative without cancellation.

    Args:
        problem: Problem whose cost is differentiated.
        u: Control to differentiate at; a random interior control by default.
        directions: Number of random directions.
        seed: Seed of the direction (and default control) generator.
        step: Finite-difference step.
        tolerance: Largest accepted relative error.
    """
    rng = np.random.default_rng(seed)
    control = _random_interior_control(problem, rng) if u is None else u
    states = problem.simulate(control)
    adjoints = problem.costates(states, control)
    gradient = objective_gradient(problem, control, states, adjoints)
    weights = quadrature_weights(problem.grid)
    nodes = problem.grid.nodes
    horizon = problem.grid.horizon
    u_max = problem.bounds.u_max

    errors = []
    details = []
    for index in range(directions):
        centre = nodes[int(rng.integers(1, problem.grid.n_steps))]
        d = _bump(nodes, centre, horizon / 8.0)
        feasible = (control.values - step * d >= 0.0) & (
            control.values + step * d <= u_max
        )
        d = np.where(feasible, d, 0.0)
        plus = problem.cost(ControlTrajectory(problem.grid, control.values + step * d))
        minus = problem.cost(ControlTrajectory(problem.grid, control.values - step * d))
        finite_difference = (plus - minus) / (2.0 * step)
        analytic = float(np.sum(weights * gradient * d))
        scale = float(np.sum(weights * np.abs(gradient) * np.abs(d)))
        difference = abs(finite_difference - analytic)
        error = difference / scale if scale > 0.0 else difference
        errors.append(error)
        if error > tolerance:
            details.append(
                f"direction {index} at t={centre:.4g}: fd={finite_difference:.6e}, "
                f"adjoint={analytic:.6e}, error={error:.2e}"
            )

    return ProbeReport(
        f"gradient-{problem.kind.label.lower()}",
        directions,
        len(details),
        max(errors) if errors else 0.0,
        vacuous=directions == 0,
        details=tuple(details[:MAX_DETAILS]),
    )
