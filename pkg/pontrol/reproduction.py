"""Basic and controlled reproduction ratios.

Examples:
    >>> params = reference_params(3.0)
    >>> round(r0_basic(params), 4)
    3.0
"""

from __future__ import annotations

# Standard library imports
from typing import Dict, Final, Tuple

# Third-party imports
from scipy.optimize import brentq

from .dynamics import check_control
from .models import EpidemicParams, InvalidInputError, ModelKind, NormalizedState

DEFAULT_BETA_RATIO: Final[float] = 0.1

# Published transmission rates for the reference scenarios.
REFERENCE_R0_TABLE: Final[Dict[float, Tuple[float, float]]] = {
    2.5: (0.215146, 0.021515),
    3.0: (0.258176, 0.025818),
    4.0: (0.344234, 0.034423),
    6.0: (0.516351, 0.051635),
}


def _removal_rates(params: EpidemicParams) -> Tuple[float, float]:
    if params.rho1 <= 0.0 or params.rho2 <= 0.0:
        raise ZeroDivisionError("Removal rates rho1 and rho2 must be positive")
    return params.sigma1 / params.rho1, params.sigma2 / params.rho2


def r0_basic(params: EpidemicParams) -> float:
    """Return ``beta1*sigma1/rho1 + beta2*sigma2/rho2``.

    Raises:
        ZeroDivisionError: If a removal rate is zero.
    """
    c1, c2 = _removal_rates(params)
    return params.beta1 * c1 + params.beta2 * c2


def r0_controlled(kind: ModelKind, params: EpidemicParams, u: float) -> float:
    """Reproduction ratio under a constant quarantine intensity ``u``.

    Model 1 scales the asymptomatic term by (1-u)^2 and the symptomatic term
    by (1-u); Model 2 scales only the asymptomatic term by (1-u).

    Raises:
        InvalidControlError: If ``u`` lies outside [0, 1).
        ZeroDivisionError: If a removal rate is zero.
    """
    check_control(u)
    c1, c2 = _removal_rates(params)
    w = 1.0 - u
    if kind is ModelKind.MODEL1:
        return w * w * params.beta1 * c1 + w * params.beta2 * c2
    return w * params.beta1 * c1 + params.beta2 * c2


def beta_from_r0(
    r0: float, params: EpidemicParams, beta_ratio: float = DEFAULT_BETA_RATIO
) -> Tuple[float, float]:
    """Invert :func:`r0_basic` under ``beta2 = beta_ratio * beta1``.

    Args:
        r0: Target basic reproduction ratio (positive).
        params: Supplies gamma, sigmas, rhos and q; its betas are ignored.
        beta_ratio: Ratio beta2 / beta1.

    Returns:
        The pair ``(beta1, beta2)``.

    Raises:
        InvalidInputError: If ``r0`` is not positive or the ratio is negative.
        ZeroDivisionError: If the denominator of the inversion vanishes.
    """
    if not r0 > 0.0:
        raise InvalidInputError(f"r0 must be positive, got {r0}")
    if beta_ratio < 0.0:
        raise InvalidInputError(f"beta_ratio must be non-negative, got {beta_ratio}")
    c1, c2 = _removal_rates(params)
    denominator = c1 + beta_ratio * c2
    if denominator <= 0.0:
        raise ZeroDivisionError("Degenerate denominator in beta_from_r0")
    beta1 = r0 / denominator
    return beta1, beta_ratio * beta1


def reference_params(
    r0: float = 3.0, beta_ratio: float = DEFAULT_BETA_RATIO
) -> EpidemicParams:
    """Reference rates with betas chosen to give the requested ``r0``."""
    base = EpidemicParams(beta1=0.0, beta2=0.0)
    return base.with_betas(*beta_from_r0(r0, base, beta_ratio))


def reference_initial_state() -> NormalizedState:
    """Reference initial fractions of a population of ten million."""
    return NormalizedState(s=0.99985, e=5e-5, i=8e-5, j=2e-5, r=0.0, n=1.0)


def critical_control(kind: ModelKind, params: EpidemicParams) -> float:
    """Smallest constant control bringing the reproduction ratio to 1.

    Returns 0 when the uncontrolled ratio is already at most 1. The ratio is
    strictly decreasing in ``u`` and vanishes as ``u -> 1`` for Model 1, so the
    root is bracketed there. For Model 2 the symptomatic term is unaffected by
    control; when it alone is at least 1 no admissible control suffices and
    ``1.0`` is returned.
    """
    if r0_basic(params) <= 1.0:
        return 0.0
    upper = 1.0 - 1e-12
    if r0_controlled(kind, params, upper) >= 1.0:
        return 1.0
    return float(brentq(lambda u: r0_controlled(kind, params, u) - 1.0, 0.0, upper))
