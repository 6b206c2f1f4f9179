"""Objective, Hamiltonian coefficients and pointwise control synthesis.

The quarantine cost is

    Q(u) = alpha1 * (e + i + j)(T) + alpha2 * int (e + i + j) dt
           + 0.5 * alpha3 * int u^2 dt

and is minimized over controls with values in [0, u_max]. For Model 1 the
Hamiltonian is the concave-or-convex quadratic ``H = -A u^2 + B u - C``; for
Model 2 it is always concave in ``u`` and its maximizer is the indicator
``lambda = beta1 s i (phi1 - phi2) / (alpha3 n)``.
"""

from __future__ import annotations

# Standard library imports
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Final, Optional

# Third-party imports
import numpy as np
from scipy import integrate

from .integrators import (
    AdjointTrajectory,
    ControlTrajectory,
    StateTrajectory,
    TimeGrid,
    integrate_adjoint_backward,
    integrate_forward,
)
from .models import (
    N_FLOOR,
    AdjointState,
    ControlBounds,
    EpidemicParams,
    InvalidInputError,
    ModelKind,
    NormalizedState,
    ObjectiveWeights,
    SingularityError,
    validate_initial_state,
)
from .reproduction import reference_initial_state, reference_params

A_ZERO_TOLERANCE: Final[float] = 1e-14


class Quadrature(str, Enum):
    """Rule used for the integral terms of the cost."""

    TRAPEZOID = "trapezoid"
    SIMPSON = "simpson"


def integrate_nodes(
    values: np.ndarray, grid: TimeGrid, quadrature: Quadrature = Quadrature.TRAPEZOID
) -> float:
    """Integrate node values over the grid with the chosen rule."""
    if quadrature is Quadrature.SIMPSON:
        return float(integrate.simpson(values, dx=grid.step))
    return float(integrate.trapezoid(values, dx=grid.step))


def quadrature_weights(grid: TimeGrid) -> np.ndarray:
    """Trapezoid weights: ``h`` at interior nodes, ``h / 2`` at both ends."""
    weights = np.full(grid.n_steps + 1, grid.step)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    return weights


@dataclass(frozen=True)
class OcpProblem:
    """One optimal control problem (model, data, weights, bounds and grid).

    Examples:
        >>> problem = OcpProblem(ModelKind.MODEL2, grid=TimeGrid(15.0, 300))
        >>> problem.bounds.u_max
        0.9
    """

    kind: ModelKind
    params: EpidemicParams = field(default_factory=reference_params)
    weights: ObjectiveWeights = field(default_factory=ObjectiveWeights)
    bounds: ControlBounds = field(default_factory=ControlBounds)
    ic: NormalizedState = field(default_factory=reference_initial_state)
    grid: TimeGrid = field(default_factory=lambda: TimeGrid(60.0))
    quadrature: Quadrature = Quadrature.TRAPEZOID

    def __post_init__(self) -> None:
        validate_initial_state(self.ic)
        if not isinstance(self.kind, ModelKind):
            raise InvalidInputError(f"Unknown model kind: {self.kind!r}")

    def with_grid(self, grid: TimeGrid) -> OcpProblem:
        """Copy of the problem on another grid."""
        return replace(self, grid=grid)

    def constant_control(self, value: float) -> ControlTrajectory:
        """Constant control on this problem's grid."""
        return ControlTrajectory.constant(self.grid, value)

    def simulate(self, u: Optional[ControlTrajectory] = None) -> StateTrajectory:
        """Forward solution for ``u`` (uncontrolled when ``None``)."""
        return integrate_forward(self.kind, self.params, self.ic, u, self.grid)

    def costates(
        self, states: StateTrajectory, u: ControlTrajectory
    ) -> AdjointTrajectory:
        """Backward costate solution with transversality data at T."""
        return integrate_adjoint_backward(
            self.kind, self.params, self.weights, states, u
        )

    def cost(self, u: ControlTrajectory) -> float:
        """Objective value of a control (one forward integration)."""
        return objective(self.simulate(u), u, self.weights, self.quadrature)


def objective(
    traj: StateTrajectory,
    u: ControlTrajectory,
    weights: ObjectiveWeights,
    quadrature: Quadrature = Quadrature.TRAPEZOID,
) -> float:
    """Evaluate the quarantine cost on a grid.

    Args:
        traj: States at the grid nodes.
        u: Control at the same nodes.
        weights: Cost weights.
        quadrature: Rule for the two integral terms.

    Returns:
        The cost ``Q``.

    Raises:
        InvalidInputError: If the trajectories live on different grids.
    """
    if traj.grid != u.grid:
        raise InvalidInputError("State and control trajectories use different grids")
    active = traj.active()
    terminal = weights.alpha1 * float(active[-1])
    running = weights.alpha2 * integrate_nodes(active, traj.grid, quadrature)
    effort = 0.5 * weights.alpha3 * integrate_nodes(u.values**2, traj.grid, quadrature)
    return terminal + running + effort


@dataclass(frozen=True)
class HamiltonianCoeffs:
    """Coefficients of ``H = -A u^2 + B u - C`` for Model 1.

    ``C`` never affects the maximizer and is kept for diagnostics.
    """

    A: float
    B: float
    C: float = 0.0


def hamiltonian_coeffs_m1(
    state: NormalizedState,
    adjoint: AdjointState,
    params: EpidemicParams,
    weights: ObjectiveWeights,
) -> HamiltonianCoeffs:
    """Quadratic coefficients of the Model 1 Hamiltonian at one instant.

    Raises:
        InvalidInputError: If ``adjoint`` is not a Model 1 costate.
    """
    if adjoint.kind is not ModelKind.MODEL1:
        raise InvalidInputError(
            f"Model 1 coefficients need a Model 1 costate, got {adjoint.kind.label}"
        )
    p1, p2, p3, p4 = adjoint.values[:4]
    s, e, i, j = state.s, state.e, state.i, state.j
    d = p1 - p2
    a = params.beta1 * s * i * d + 0.5 * weights.alpha3
    b = s * (2.0 * params.beta1 * i + params.beta2 * j) * d
    c = (
        s * (params.beta1 * i + params.beta2 * j) * d
        + params.gamma * e * (p2 - params.sigma1 * p3 - params.sigma2 * p4)
        + params.rho1 * i * p3
        + params.rho2 * j * p4
        + weights.alpha2 * (e + i + j)
    )
    return HamiltonianCoeffs(A=a, B=b, C=c)


def indicator_m1(coeffs: HamiltonianCoeffs) -> Optional[float]:
    """Unconstrained maximizer ``B / (2A)``, or ``None`` when ``|A| < 1e-14``."""
    if abs(coeffs.A) < A_ZERO_TOLERANCE:
        return None
    return coeffs.B / (2.0 * coeffs.A)


def synthesize_u_m1(coeffs: HamiltonianCoeffs, bounds: ControlBounds) -> float:
    """Optimal control value of Model 1 given the Hamiltonian coefficients.

    For ``A > 0`` the Hamiltonian is concave and its maximizer is the clamped
    indicator. For ``A <= 0`` the optimal value is 0.
    """
    if coeffs.A < A_ZERO_TOLERANCE:
        return 0.0
    return bounds.clamp(coeffs.B / (2.0 * coeffs.A))


def indicator_m2(
    state: NormalizedState,
    adjoint: AdjointState,
    params: EpidemicParams,
    weights: ObjectiveWeights,
) -> float:
    """Model 2 indicator ``beta1 s i (phi1 - phi2) / (alpha3 n)``.

    Raises:
        SingularityError: If ``n`` is not positive.
    """
    if state.n <= N_FLOOR:
        raise SingularityError(f"Population n={state.n} reached the division floor")
    return params.beta1 * state.s * state.i * adjoint.difference / (
        weights.alpha3 * state.n
    )


def synthesize_u_m2(lam: float, bounds: ControlBounds) -> float:
    """Clamp the Model 2 indicator to ``[0, u_max]``."""
    return bounds.clamp(lam)


def hamiltonian(
    kind: ModelKind,
    state: NormalizedState,
    adjoint: AdjointState,
    u: float,
    params: EpidemicParams,
    weights: ObjectiveWeights,
) -> float:
    """Value of the Hamiltonian (costs entering with a negative sign)."""
    if adjoint.kind is not kind:
        raise InvalidInputError(
            f"{kind.label} Hamiltonian needs a {kind.label} costate, "
            f"got {adjoint.kind.label}"
        )
    if kind is ModelKind.MODEL1:
        coeffs = hamiltonian_coeffs_m1(state, adjoint, params, weights)
        return -coeffs.A * u * u + coeffs.B * u - coeffs.C
    if state.n <= N_FLOOR:
        raise SingularityError(f"Population n={state.n} reached the division floor")
    p1, p2, p3, p4, p5 = adjoint.values
    s, e, i, j, n = state.s, state.e, state.i, state.j, state.n
    force = s * (params.beta1 * (1.0 - u) * i + params.beta2 * j) / n
    return (
        -force * (p1 - p2)
        - params.gamma * e * (p2 - params.sigma1 * p3 - params.sigma2 * p4)
        - params.rho1 * i * p3
        - params.rho2 * j * p4
        - params.q * params.rho2 * j * p5
        - weights.alpha2 * (e + i + j)
        - 0.5 * weights.alpha3 * u * u
    )


@dataclass(frozen=True, eq=False)
class ControlSynthesis:
    """Node-wise indicator and synthesized control for a whole trajectory.

    Attributes:
        indicator: ``lambda`` at every node (NaN where Model 1 has ``A ~ 0``).
        control: Synthesized control values in ``[0, u_max]``.
        A: Model 1 quadratic coefficient (``None`` for Model 2).
        B: Model 1 linear coefficient (``None`` for Model 2).
    """

    indicator: np.ndarray
    control: np.ndarray
    A: Optional[np.ndarray] = None
    B: Optional[np.ndarray] = None


def control_indicators(
    problem: OcpProblem, states: StateTrajectory, adjoints: AdjointTrajectory
) -> ControlSynthesis:
    """Vectorized indicator and control synthesis over all grid nodes.

    Raises:
        SingularityError: If ``n`` reaches the division floor (Model 2).
    """
    params, weights, u_max = problem.params, problem.weights, problem.bounds.u_max
    s, i, j, n = states.s, states.i, states.j, states.n
    d = adjoints.difference()

    if problem.kind is ModelKind.MODEL1:
        a = params.beta1 * s * i * d + 0.5 * weights.alpha3
        b = s * (2.0 * params.beta1 * i + params.beta2 * j) * d
        defined = np.abs(a) >= A_ZERO_TOLERANCE
        lam = np.full_like(a, np.nan)
        np.divide(b, 2.0 * a, out=lam, where=defined)
        concave = a >= A_ZERO_TOLERANCE
        control = np.clip(np.where(concave, lam, 0.0), 0.0, u_max)
        return ControlSynthesis(indicator=lam, control=control, A=a, B=b)

    if n.min() <= N_FLOOR:
        raise SingularityError("Population n reached the division floor")
    lam = params.beta1 * s * i * d / (weights.alpha3 * n)
    return ControlSynthesis(indicator=lam, control=np.clip(lam, 0.0, u_max))


def objective_gradient(
    problem: OcpProblem,
    u: ControlTrajectory,
    state_traj: StateTrajectory,
    adjoint_traj: AdjointTrajectory,
) -> np.ndarray:
    """Node-wise gradient of the cost, ``-dH/du`` along the trajectories.

    Multiplying by :func:`quadrature_weights` gives the derivative of the
    discretized cost with respect to each node value of the control.
    """
    params, weights = problem.params, problem.weights
    s, i, j, n = state_traj.s, state_traj.i, state_traj.j, state_traj.n
    d = adjoint_traj.difference()
    values = u.values
    if problem.kind is ModelKind.MODEL1:
        return weights.alpha3 * values - s * (
            2.0 * params.beta1 * (1.0 - values) * i + params.beta2 * j
        ) * d
    if n.min() <= N_FLOOR:
        raise SingularityError("Population n reached the division floor")
    return weights.alpha3 * values - params.beta1 * s * i * d / n
