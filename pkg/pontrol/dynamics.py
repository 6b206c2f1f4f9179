"""Normalization and right-hand sides of the epidemic models.

The public functions take and return the value types from
:mod:`pontrol.models`. The ``make_*`` factories build closures over plain
float tuples for the inner loops of the integrators.
"""

from __future__ import annotations

# Standard library imports
from typing import Callable, Tuple

from .models import (
    N_FLOOR,
    EpidemicParams,
    InvalidControlError,
    ModelKind,
    NormalizedState,
    ObjectiveWeights,
    RawPopulation,
    SingularityError,
    StateDerivative,
)

Vector = Tuple[float, ...]
StateRhs = Callable[[Vector, float], Vector]
AdjointRhs = Callable[[Vector, Vector, float], Vector]


def normalize(
    raw: RawPopulation, params: EpidemicParams
) -> Tuple[NormalizedState, EpidemicParams]:
    """Divide compartments by N and scale raw transmission rates by N.

    Args:
        raw: Compartment counts and raw per-person transmission rates.
        params: Rates whose betas are replaced by the scaled raw values.

    Returns:
        The normalized initial state (with n = 1) and the updated parameters.

    Raises:
        InvalidInputError: If the raw population is invalid (checked when it
            was constructed) or the scaled betas violate parameter invariants.

    Examples:
        >>> raw = RawPopulation(S=100, E=0, I=0, J=0, R=0, N=100)
        >>> state, _ = normalize(raw, EpidemicParams(0.0, 0.0))
        >>> state.s, state.n
        (1.0, 1.0)
    """
    n0 = raw.N
    state = NormalizedState(
        s=raw.S / n0,
        e=raw.E / n0,
        i=raw.I / n0,
        j=raw.J / n0,
        r=raw.R / n0,
        n=1.0,
    )
    scaled = params.with_betas(raw.beta1_tilde * n0, raw.beta2_tilde * n0)
    return state, scaled


def check_control(u: float) -> None:
    """Raise :class:`InvalidControlError` unless ``0 <= u < 1``."""
    if not 0.0 <= u < 1.0:
        raise InvalidControlError(f"Control must lie in [0, 1), got {u}")


def make_state_rhs(kind: ModelKind, params: EpidemicParams) -> StateRhs:
    """Build ``rhs(x, u)`` for the state system on ``(s, e, i, j, r, n)`` tuples."""
    b1, b2 = params.beta1, params.beta2
    gamma, s1, s2 = params.gamma, params.sigma1, params.sigma2
    r1, r2 = params.rho1, params.rho2
    r2_recover = (1.0 - params.q) * r2
    r2_death = params.q * r2

    if kind is ModelKind.MODEL1:

        def force(s: float, i: float, j: float, n: float, u: float) -> float:
            w = 1.0 - u
            return s * (b1 * w * w * i + b2 * w * j)

    else:

        def force(s: float, i: float, j: float, n: float, u: float) -> float:
            if n <= N_FLOOR:
                raise SingularityError(f"Population n={n} reached the division floor")
            return s * (b1 * (1.0 - u) * i + b2 * j) / n

    def rhs(x: Vector, u: float) -> Vector:
        s, e, i, j, _r, n = x
        f = force(s, i, j, n, u)
        ge = gamma * e
        return (
            -f,
            f - ge,
            s1 * ge - r1 * i,
            s2 * ge - r2 * j,
            r1 * i + r2_recover * j,
            -r2_death * j,
        )

    return rhs


def make_adjoint_rhs(
    kind: ModelKind, params: EpidemicParams, weights: ObjectiveWeights
) -> AdjointRhs:
    """Build ``rhs(p, x, u)`` for the costate system.

    Model 1 costates are (psi1, psi2, psi3, psi4); Model 2 costates are
    (phi1, ..., phi5), phi5 being conjugate to n.
    """
    b1, b2 = params.beta1, params.beta2
    gamma, s1, s2 = params.gamma, params.sigma1, params.sigma2
    r1, r2, q = params.rho1, params.rho2, params.q
    a2 = weights.alpha2

    if kind is ModelKind.MODEL1:

        def rhs(p: Vector, x: Vector, u: float) -> Vector:
            p1, p2, p3, p4 = p
            s, i, j = x[0], x[2], x[3]
            w = 1.0 - u
            d = p1 - p2
            return (
                (b1 * w * w * i + b2 * w * j) * d,
                gamma * (p2 - s1 * p3 - s2 * p4) + a2,
                b1 * w * w * s * d + r1 * p3 + a2,
                b2 * w * s * d + r2 * p4 + a2,
            )

        return rhs

    def rhs_m2(p: Vector, x: Vector, u: float) -> Vector:
        p1, p2, p3, p4, p5 = p
        s, i, j, n = x[0], x[2], x[3], x[5]
        if n <= N_FLOOR:
            raise SingularityError(f"Population n={n} reached the division floor")
        m = 1.0 / n
        w = 1.0 - u
        d = p1 - p2
        force = b1 * w * i + b2 * j
        return (
            m * force * d,
            gamma * (p2 - s1 * p3 - s2 * p4) + a2,
            b1 * w * s * m * d + r1 * p3 + a2,
            b2 * s * m * d + r2 * (p4 + q * p5) + a2,
            -s * m * m * force * d,
        )

    return rhs_m2


def rhs_controlled(
    kind: ModelKind, state: NormalizedState, u: float, params: EpidemicParams
) -> StateDerivative:
    """Evaluate the controlled system at one state.

    Args:
        kind: Incidence form.
        state: Current fractions.
        u: Quarantine intensity in [0, 1).
        params: Model rates.

    Returns:
        The derivative (s', e', i', j', r', n').

    Raises:
        InvalidControlError: If ``u`` lies outside [0, 1).
        SingularityError: If ``n`` is not positive (Model 2 only).
    """
    check_control(u)
    rhs = make_state_rhs(kind, params)
    return StateDerivative(*rhs(state.as_tuple(), u))


def rhs_uncontrolled(
    kind: ModelKind, state: NormalizedState, params: EpidemicParams
) -> StateDerivative:
    """Evaluate the system without quarantine (``u = 0``)."""
    return rhs_controlled(kind, state, 0.0, params)
