"""Domain types for the quarantine-controlled epidemic models.

This module provides the immutable value types shared by every other part of
the library: model parameters, raw and normalized populations, control bounds,
objective weights and costate vectors, together with the error hierarchy.

Classes:
    ModelKind: Which incidence form (bilinear or standard) is in use.
    EpidemicParams: Rate constants of the epidemic models.
    RawPopulation: Compartment counts before normalization.
    NormalizedState: Population fractions (s, e, i, j, r, n).
    StateDerivative: Time derivative of a normalized state.
    ControlBounds: Admissible quarantine intensity interval [0, u_max].
    ObjectiveWeights: Weights of the quarantine cost functional.
    AdjointState: Costate vector at one instant.
    ModelError: Base class of all domain errors.
"""

from __future__ import annotations

# Standard library imports
import math
from dataclasses import dataclass, field, fields
from enum import Enum
from typing import Final, Optional, Sequence, Tuple

SIGMA_TOLERANCE: Final[float] = 1e-12
RAW_SUM_TOLERANCE: Final[float] = 1e-6
N_FLOOR: Final[float] = 1e-12


@dataclass(frozen=True)
class ModelError(Exception):
    """Base exception for model, integration and control errors.

    Attributes:
        message: Error message describing what went wrong.
    """

    message: str

    def __str__(self) -> str:
        return self.message


@dataclass(frozen=True)
class InvalidInputError(ModelError):
    """Raised when parameters or populations violate their invariants."""


@dataclass(frozen=True)
class InvalidControlError(ModelError):
    """Raised when a control value lies outside the admissible interval."""


@dataclass(frozen=True)
class SingularityError(ModelError):
    """Raised when the total population n reaches the division floor."""


@dataclass(frozen=True)
class IntegrationError(ModelError):
    """Raised when an integration produces negative or non-finite values.

    Attributes:
        message: Error message describing what went wrong.
        node: Index of the grid node where the failure was detected.
    """

    node: Optional[int] = None


class ModelKind(int, Enum):
    """Incidence form of the epidemic model.

    ``MODEL1`` uses bilinear incidence with quarantine entering quadratically
    for asymptomatic contacts; ``MODEL2`` uses standard incidence divided by
    the living population n.
    """

    MODEL1 = 1
    MODEL2 = 2

    @property
    def adjoint_dim(self) -> int:
        """Number of costate components carried by the problem."""
        return 4 if self is ModelKind.MODEL1 else 5

    @property
    def label(self) -> str:
        """Human readable name."""
        return f"Model-{self.value}"

    @classmethod
    def parse(cls, value: object) -> ModelKind:
        """Build a kind from ``1``, ``2``, ``"1"``, ``"model1"`` and similar.

        Raises:
            InvalidInputError: If the value names no model.
        """
        if isinstance(value, ModelKind):
            return value
        text = str(value).strip().lower().replace("-", "").replace("model", "")
        try:
            return cls(int(text))
        except ValueError as e:
            raise InvalidInputError(f"Unknown model kind: {value!r}") from e


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise InvalidInputError(f"{name} must be finite, got {value}")


@dataclass(frozen=True)
class EpidemicParams:
    """Rate constants of both epidemic models (normalized units, 1/day).

    Attributes:
        beta1: Transmission rate from asymptomatic carriers.
        beta2: Transmission rate from symptomatic patients.
        gamma: Rate of leaving the latent stage.
        sigma1: Fraction of exposed becoming asymptomatic.
        sigma2: Fraction of exposed becoming symptomatic.
        rho1: Removal rate of asymptomatic carriers.
        rho2: Removal rate of symptomatic patients.
        q: Probability that a symptomatic patient dies.

    Examples:
        >>> params = EpidemicParams(beta1=0.258176, beta2=0.0258176)
        >>> params.sigma1 + params.sigma2
        1.0
    """

    beta1: float
    beta2: float
    gamma: float = 0.18
    sigma1: float = 0.8
    sigma2: float = 0.2
    rho1: float = 1.0 / 14.0
    rho2: float = 1.0 / 21.0
    q: float = 0.15

    def __post_init__(self) -> None:
        for item in fields(self):
            value = float(getattr(self, item.name))
            _require_finite(item.name, value)
            if value < 0.0:
                raise InvalidInputError(
                    f"{item.name} must be non-negative, got {value}"
                )
        if abs(self.sigma1 + self.sigma2 - 1.0) > SIGMA_TOLERANCE:
            raise InvalidInputError(
                f"sigma1 + sigma2 must equal 1, got {self.sigma1 + self.sigma2!r}"
            )
        if self.q > 1.0:
            raise InvalidInputError(f"q must lie in [0, 1], got {self.q}")
        # Both zero is the transmission-free limit.
        if not (self.beta1 == 0.0 and self.beta2 == 0.0) and self.beta1 <= self.beta2:
            raise InvalidInputError(
                f"beta1 must exceed beta2, got beta1={self.beta1}, beta2={self.beta2}"
            )

    def with_betas(self, beta1: float, beta2: float) -> EpidemicParams:
        """Return a copy with new transmission rates."""
        return EpidemicParams(
            beta1=beta1,
            beta2=beta2,
            gamma=self.gamma,
            sigma1=self.sigma1,
            sigma2=self.sigma2,
            rho1=self.rho1,
            rho2=self.rho2,
            q=self.q,
        )

    @property
    def beta_ratio(self) -> float:
        """Ratio beta2 / beta1 (0 when beta1 is 0)."""
        return self.beta2 / self.beta1 if self.beta1 > 0.0 else 0.0


@dataclass(frozen=True)
class RawPopulation:
    """Compartment counts and raw per-person transmission rates.

    Attributes:
        S: Susceptible persons.
        E: Exposed (latent) persons.
        I: Asymptomatic carriers.
        J: Symptomatic patients.
        R: Recovered persons.
        N: Living population (equal to the sum of the other counts).
        beta1_tilde: Raw asymptomatic transmission rate, 1/(person*day).
        beta2_tilde: Raw symptomatic transmission rate, 1/(person*day).
    """

    S: float
    E: float
    I: float  # noqa: E741
    J: float
    R: float
    N: float
    beta1_tilde: float = 0.0
    beta2_tilde: float = 0.0

    def __post_init__(self) -> None:
        for item in fields(self):
            _require_finite(item.name, float(getattr(self, item.name)))
        if self.N <= 0.0:
            raise InvalidInputError(f"Population N must be positive, got {self.N}")
        for name in ("S", "E", "I", "J", "R", "beta1_tilde", "beta2_tilde"):
            if getattr(self, name) < 0.0:
                raise InvalidInputError(f"{name} must be non-negative")
        total = self.S + self.E + self.I + self.J + self.R
        if abs(total - self.N) > RAW_SUM_TOLERANCE * self.N:
            raise InvalidInputError(f"Compartments sum to {total}, expected N={self.N}")


@dataclass(frozen=True)
class NormalizedState:
    """Population fractions relative to the initial population.

    No sum check is made at construction so that trajectories with numerical
    defects can still be represented and probed. Initial conditions are
    validated by :func:`validate_initial_state`.
    """

    s: float
    e: float
    i: float
    j: float
    r: float
    n: float

    def as_tuple(self) -> Tuple[float, float, float, float, float, float]:
        """Return ``(s, e, i, j, r, n)``."""
        return (self.s, self.e, self.i, self.j, self.r, self.n)

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> NormalizedState:
        """Build a state from six ordered values."""
        if len(values) != 6:
            raise InvalidInputError(f"Expected 6 state values, got {len(values)}")
        return cls(*(float(v) for v in values))

    @property
    def active(self) -> float:
        """Exposed plus infected fraction e + i + j."""
        return self.e + self.i + self.j

    @property
    def infected(self) -> float:
        """Infected fraction i + j."""
        return self.i + self.j

    def conservation_residual(self) -> float:
        """Absolute value of s + e + i + j + r - n."""
        return abs(self.s + self.e + self.i + self.j + self.r - self.n)


INITIAL_SUM_TOLERANCE: Final[float] = 1e-9


def validate_initial_state(state: NormalizedState) -> None:
    """Check that an initial state is a normalized population.

    Raises:
        InvalidInputError: If a component is negative or non-finite, if n is
            not 1, or if the compartments do not sum to 1.
    """
    for name, value in zip("seijrn", state.as_tuple()):
        _require_finite(name, value)
        if value < 0.0:
            raise InvalidInputError(
                f"Initial {name} must be non-negative, got {value}"
            )
    if abs(state.n - 1.0) > INITIAL_SUM_TOLERANCE:
        raise InvalidInputError(f"Initial n must equal 1, got {state.n}")
    total = state.s + state.e + state.i + state.j + state.r
    if abs(total - 1.0) > INITIAL_SUM_TOLERANCE:
        raise InvalidInputError(f"Initial fractions sum to {total!r}, expected 1")


@dataclass(frozen=True)
class StateDerivative:
    """Time derivative (s', e', i', j', r', n') of a normalized state."""

    s: float
    e: float
    i: float
    j: float
    r: float
    n: float

    def as_tuple(self) -> Tuple[float, float, float, float, float, float]:
        """Return the six derivative components in state order."""
        return (self.s, self.e, self.i, self.j, self.r, self.n)

    def balance_residual(self) -> float:
        """Absolute value of s' + e' + i' + j' + r' - n'."""
        return abs(self.s + self.e + self.i + self.j + self.r - self.n)


@dataclass(frozen=True)
class ControlBounds:
    """Admissible quarantine intensities ``0 <= u <= u_max``."""

    u_max: float = 0.9

    def __post_init__(self) -> None:
        _require_finite("u_max", self.u_max)
        if not 0.0 < self.u_max < 1.0:
            raise InvalidInputError(f"u_max must lie in (0, 1), got {self.u_max}")

    @property
    def w_min(self) -> float:
        """Smallest admissible contact fraction 1 - u_max."""
        return 1.0 - self.u_max

    def clamp(self, value: float) -> float:
        """Project a value onto [0, u_max]."""
        return min(max(value, 0.0), self.u_max)


@dataclass(frozen=True)
class ObjectiveWeights:
    """Weights of the quarantine cost.

    The cost is ``alpha1 * P + alpha2 * int(e + i + j) + 0.5 * alpha3 * int(u^2)``
    where ``P = e(T) + i(T) + j(T)`` is the terminal part.
    """

    alpha1: float = 1.0
    alpha2: float = 1.0
    alpha3: float = 5e-5

    def __post_init__(self) -> None:
        for item in fields(self):
            _require_finite(item.name, float(getattr(self, item.name)))
        if self.alpha1 < 0.0 or self.alpha2 < 0.0:
            raise InvalidInputError("alpha1 and alpha2 must be non-negative")
        if self.alpha3 <= 0.0:
            raise InvalidInputError(f"alpha3 must be positive, got {self.alpha3}")

    def terminal_cost(self, state: NormalizedState) -> float:
        """Weighted terminal part ``alpha1 * (e(T) + i(T) + j(T))``."""
        return self.alpha1 * state.active


@dataclass(frozen=True)
class AdjointState:
    """Costate vector at one instant.

    Model 1 carries psi1..psi4, Model 2 carries phi1..phi5.
    """

    kind: ModelKind
    values: Tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if len(self.values) != self.kind.adjoint_dim:
            raise InvalidInputError(
                f"{self.kind.label} needs {self.kind.adjoint_dim} costates, "
                f"got {len(self.values)}"
            )
        for k, value in enumerate(self.values, start=1):
            _require_finite(f"costate {k}", value)

    @classmethod
    def terminal(cls, kind: ModelKind, weights: ObjectiveWeights) -> AdjointState:
        """Transversality data at t = T for the given model."""
        a1 = weights.alpha1
        if kind is ModelKind.MODEL1:
            return cls(kind, (0.0, -a1, -a1, -a1))
        return cls(kind, (0.0, -a1, -a1, -a1, 0.0))

    @property
    def difference(self) -> float:
        """Costate difference psi1 - psi2 driving the control."""
        return self.values[0] - self.values[1]
