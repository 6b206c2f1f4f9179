"""Fixed-step RK4 integration of state and costate systems.

States are integrated forward from t = 0 and costates backward from t = T on
a shared uniform grid. Controls are stored at the grid nodes and interpolated
linearly at the RK substages; during the backward pass the stored states are
interpolated the same way.

Classes:
    TimeGrid: Uniform grid on [0, T].
    StateTrajectory: States at every node.
    ControlTrajectory: Control values at every node.
    AdjointTrajectory: Costates at every node.
    RefinementReport: Result of the step-halving convergence check.
"""

from __future__ import annotations

# Standard library imports
import logging
import math
from dataclasses import dataclass
from typing import Final, List, Optional, Sequence, Tuple

# Third-party imports
import numpy as np

from .dynamics import Vector, make_adjoint_rhs, make_state_rhs
from .models import (
    AdjointState,
    ControlBounds,
    EpidemicParams,
    IntegrationError,
    InvalidControlError,
    InvalidInputError,
    ModelKind,
    NormalizedState,
    ObjectiveWeights,
    validate_initial_state,
)

logger = logging.getLogger(__name__)

POSITIVITY_TOLERANCE: Final[float] = 1e-9
DEFAULT_STEPS: Final[int] = 5000
STATE_NAMES: Final[Tuple[str, ...]] = ("s", "e", "i", "j", "r", "n")
REFINEMENT_ORDER_THRESHOLD: Final[float] = 3.5


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid ``t_k = k * T / n_steps`` for ``k = 0..n_steps``.

    Attributes:
        horizon: Final time T in days.
        n_steps: Number of steps (at least 2).
    """

    horizon: float
    n_steps: int = DEFAULT_STEPS

    def __post_init__(self) -> None:
        if not (math.isfinite(self.horizon) and self.horizon > 0.0):
            raise InvalidInputError(f"Horizon must be positive, got {self.horizon}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 2:
            raise InvalidInputError(
                f"n_steps must be an integer >= 2, got {self.n_steps}"
            )

    @property
    def step(self) -> float:
        """Node spacing h = T / n_steps."""
        return self.horizon / self.n_steps

    @property
    def nodes(self) -> np.ndarray:
        """Array of the n_steps + 1 node times."""
        return np.linspace(0.0, self.horizon, self.n_steps + 1)

    def refine(self, factor: int = 2) -> TimeGrid:
        """Grid on the same horizon with ``factor`` times as many steps."""
        return TimeGrid(self.horizon, self.n_steps * factor)


@dataclass(frozen=True, eq=False)
class StateTrajectory:
    """States at every node of a grid, stored as an ``(n_steps + 1, 6)`` array.

    Only the shape is validated so that defective trajectories can be probed.
    """

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        expected = (self.grid.n_steps + 1, len(STATE_NAMES))
        if self.values.shape != expected:
            raise InvalidInputError(
                f"State array has shape {self.values.shape}, expected {expected}"
            )

    def column(self, name: str) -> np.ndarray:
        """Values of one compartment (``"s"``, ``"e"``, ...)."""
        return self.values[:, STATE_NAMES.index(name)]

    @property
    def s(self) -> np.ndarray:
        return self.values[:, 0]

    @property
    def e(self) -> np.ndarray:
        return self.values[:, 1]

    @property
    def i(self) -> np.ndarray:
        return self.values[:, 2]

    @property
    def j(self) -> np.ndarray:
        return self.values[:, 3]

    @property
    def r(self) -> np.ndarray:
        return self.values[:, 4]

    @property
    def n(self) -> np.ndarray:
        return self.values[:, 5]

    def infected(self) -> np.ndarray:
        """Infected fraction i + j at every node."""
        return self.i + self.j

    def active(self) -> np.ndarray:
        """Exposed plus infected fraction e + i + j at every node."""
        return self.e + self.i + self.j

    def conservation_residual(self) -> np.ndarray:
        """``|s + e + i + j + r - n|`` at every node."""
        return np.abs(self.values[:, :5].sum(axis=1) - self.n)

    def at(self, k: int) -> NormalizedState:
        """State at node ``k`` (negative indices allowed)."""
        return NormalizedState.from_sequence(self.values[k].tolist())

    @property
    def final(self) -> NormalizedState:
        """State at t = T."""
        return self.at(-1)

    def peak(self) -> Tuple[float, float]:
        """Day and value of the maximum of i + j (first node on ties)."""
        infected = self.infected()
        k = int(np.argmax(infected))
        return float(self.grid.nodes[k]), float(infected[k])


@dataclass(frozen=True, eq=False)
class ControlTrajectory:
    """Quarantine intensities at every grid node.

    Raises:
        InvalidControlError: If a value lies outside [0, 1) or is not finite.
    """

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != (self.grid.n_steps + 1,):
            raise InvalidInputError(
                f"Control array has shape {self.values.shape}, "
                f"expected ({self.grid.n_steps + 1},)"
            )
        if not np.all(np.isfinite(self.values)):
            raise InvalidControlError("Control contains non-finite values")
        if self.values.min() < 0.0 or self.values.max() >= 1.0:
            raise InvalidControlError(
                f"Control values must lie in [0, 1), got range "
                f"[{self.values.min()}, {self.values.max()}]"
            )

    @classmethod
    def constant(cls, grid: TimeGrid, value: float) -> ControlTrajectory:
        """Control equal to ``value`` at every node."""
        return cls(grid, np.full(grid.n_steps + 1, float(value)))

    @classmethod
    def zeros(cls, grid: TimeGrid) -> ControlTrajectory:
        """The uncontrolled case."""
        return cls.constant(grid, 0.0)

    def within(self, bounds: ControlBounds) -> bool:
        """Check every node value against ``[0, u_max]``."""
        return bool(self.values.min() >= 0.0 and self.values.max() <= bounds.u_max)

    def resample(self, grid: TimeGrid) -> ControlTrajectory:
        """Piecewise-linear interpolation of this control onto another grid."""
        if grid.horizon != self.grid.horizon:
            raise InvalidInputError("Cannot resample a control onto another horizon")
        return ControlTrajectory(
            grid, np.interp(grid.nodes, self.grid.nodes, self.values)
        )

    def max_jump(self) -> float:
        """Largest change between neighbouring nodes."""
        return float(np.max(np.abs(np.diff(self.values))))


@dataclass(frozen=True, eq=False)
class AdjointTrajectory:
    """Costates at every node, stored as an ``(n_steps + 1, dim)`` array."""

    grid: TimeGrid
    kind: ModelKind
    values: np.ndarray

    def __post_init__(self) -> None:
        expected = (self.grid.n_steps + 1, self.kind.adjoint_dim)
        if self.values.shape != expected:
            raise InvalidInputError(
                f"Adjoint array has shape {self.values.shape}, expected {expected}"
            )

    def at(self, k: int) -> AdjointState:
        """Costate vector at node ``k``."""
        return AdjointState(self.kind, tuple(self.values[k].tolist()))

    def difference(self) -> np.ndarray:
        """First minus second costate at every node."""
        return self.values[:, 0] - self.values[:, 1]


def _check_grid(grid: TimeGrid, other: TimeGrid, what: str) -> None:
    if grid != other:
        raise InvalidInputError(f"{what} grid {other} does not match {grid}")


def _advance(x: Vector, k: Vector, h: float) -> Vector:
    return tuple([a + h * b for a, b in zip(x, k)])


def integrate_forward(
    kind: ModelKind,
    params: EpidemicParams,
    ic: NormalizedState,
    u: Optional[ControlTrajectory],
    grid: TimeGrid,
) -> StateTrajectory:
    """Integrate the state system from t = 0 with classical RK4.

    Args:
        kind: Incidence form.
        params: Model rates.
        ic: Initial fractions (must sum to 1 with n = 1).
        u: Control at the grid nodes, or ``None`` for the uncontrolled system.
        grid: Integration grid.

    Returns:
        The state at every node.

    Raises:
        InvalidInputError: If the initial state is not normalized or grids differ.
        IntegrationError: If a compartment drops below -1e-9 or becomes
            non-finite.
        SingularityError: If n reaches the division floor (Model 2).
    """
    validate_initial_state(ic)
    control = ControlTrajectory.zeros(grid) if u is None else u
    _check_grid(grid, control.grid, "Control")

    rhs = make_state_rhs(kind, params)
    h = grid.step
    half = 0.5 * h
    sixth = h / 6.0
    nodes_u: List[float] = control.values.tolist()

    x = ic.as_tuple()
    out: List[Vector] = [x]
    for k in range(grid.n_steps):
        u0 = nodes_u[k]
        u1 = nodes_u[k + 1]
        um = 0.5 * (u0 + u1)
        k1 = rhs(x, u0)
        k2 = rhs(_advance(x, k1, half), um)
        k3 = rhs(_advance(x, k2, half), um)
        k4 = rhs(_advance(x, k3, h), u1)
        x = tuple(
            [
                xi + sixth * (a + 2.0 * b + 2.0 * c + d)
                for xi, a, b, c, d in zip(x, k1, k2, k3, k4)
            ]
        )
        lowest = min(x)
        if not lowest >= -POSITIVITY_TOLERANCE or not math.isfinite(sum(x)):
            raise IntegrationError(
                f"State left the admissible region at t={(k + 1) * h:.6g}: {x}",
                node=k + 1,
            )
        out.append(x)

    return StateTrajectory(grid, np.asarray(out, dtype=float))


def integrate_adjoint_backward(
    kind: ModelKind,
    params: EpidemicParams,
    weights: ObjectiveWeights,
    state_traj: StateTrajectory,
    u: ControlTrajectory,
    terminal: Optional[AdjointState] = None,
) -> AdjointTrajectory:
    """Integrate the costate system from t = T down to t = 0 with RK4.

    Args:
        kind: Incidence form.
        params: Model rates.
        weights: Objective weights (alpha2 enters the costate equations).
        state_traj: Forward solution for the same control.
        u: Control at the grid nodes.
        terminal: Costates at t = T; defaults to the transversality data.

    Returns:
        The costates at every node.

    Raises:
        InvalidInputError: If grids differ or the terminal data has the wrong
            dimension.
        IntegrationError: If a costate becomes non-finite.
    """
    grid = state_traj.grid
    _check_grid(grid, u.grid, "Control")
    end = AdjointState.terminal(kind, weights) if terminal is None else terminal
    if end.kind is not kind:
        raise InvalidInputError(f"Terminal costates belong to {end.kind.label}")

    rhs = make_adjoint_rhs(kind, params, weights)
    h = grid.step
    half = 0.5 * h
    sixth = h / 6.0
    xs: List[Vector] = [tuple(row) for row in state_traj.values.tolist()]
    mids: List[Vector] = [
        tuple(row)
        for row in (0.5 * (state_traj.values[:-1] + state_traj.values[1:])).tolist()
    ]
    us: List[float] = u.values.tolist()

    p: Vector = end.values
    out: List[Vector] = [p]
    for k in range(grid.n_steps - 1, -1, -1):
        u1 = us[k + 1]
        u0 = us[k]
        um = 0.5 * (u0 + u1)
        k1 = rhs(p, xs[k + 1], u1)
        k2 = rhs(_advance(p, k1, -half), mids[k], um)
        k3 = rhs(_advance(p, k2, -half), mids[k], um)
        k4 = rhs(_advance(p, k3, -h), xs[k], u0)
        p = tuple(
            [
                pi - sixth * (a + 2.0 * b + 2.0 * c + d)
                for pi, a, b, c, d in zip(p, k1, k2, k3, k4)
            ]
        )
        if not math.isfinite(sum(p)):
            raise IntegrationError(
                f"Costates became non-finite at t={k * h:.6g}", node=k
            )
        out.append(p)

    out.reverse()
    return AdjointTrajectory(grid, kind, np.asarray(out, dtype=float))


@dataclass(frozen=True)
class RefinementReport:
    """Step-halving comparison on grids with n, 2n and 4n steps.

    Attributes:
        n_steps: Coarsest step count.
        coarse_error: Scaled difference of the n and 2n terminal states.
        fine_error: Scaled difference of the 2n and 4n terminal states.
        order: Observed order ``log2(coarse_error / fine_error)``; infinite
            when the fine error vanishes.
    """

    n_steps: int
    coarse_error: float
    fine_error: float
    order: float

    def passed(self, threshold: float = REFINEMENT_ORDER_THRESHOLD) -> bool:
        """True if the observed order reaches ``threshold``."""
        return self.order >= threshold


def _scaled_difference(a: Sequence[float], b: Sequence[float]) -> float:
    # Compartments span many orders of magnitude; compare each one relative
    # to its own size so that round-off in s does not mask e, i and j.
    worst = 0.0
    for x, y in zip(a, b):
        scale = max(abs(y), 1e-12)
        worst = max(worst, abs(x - y) / scale)
    return worst


def step_refinement_check(
    kind: ModelKind,
    params: EpidemicParams,
    ic: NormalizedState,
    u: Optional[ControlTrajectory],
    grid: TimeGrid,
) -> RefinementReport:
    """Estimate the observed convergence order of :func:`integrate_forward`.

    The control is resampled piecewise-linearly onto the refined grids, so all
    three runs integrate the same control function.
    """
    control = ControlTrajectory.zeros(grid) if u is None else u
    finals = []
    current = grid
    for _ in range(3):
        traj = integrate_forward(kind, params, ic, control.resample(current), current)
        finals.append(traj.values[-1].tolist())
        current = current.refine()

    coarse = _scaled_difference(finals[0], finals[1])
    fine = _scaled_difference(finals[1], finals[2])
    if fine == 0.0:
        order = math.inf
    elif coarse == 0.0:
        order = 0.0
    else:
        order = math.log2(coarse / fine)
    logger.debug(
        "Refinement check n=%d: errors %.3e, %.3e, order %.3f",
        grid.n_steps,
        coarse,
        fine,
        order,
    )
    return RefinementReport(grid.n_steps, coarse, fine, order)
