"""Solver selection and iteration settings."""

from __future__ import annotations

# Standard library imports
import math
from dataclasses import dataclass, fields
from enum import Enum
from typing import Any, Dict, Optional

from ..models import InvalidInputError


class SolverKind(str, Enum):
    """Available solution strategies."""

    FBSM = "fbsm"
    PGRAD = "pgrad"


@dataclass(frozen=True)
class SweepSettings:
    """Iteration controls shared by both solvers.

    Attributes:
        relaxation: Weight theta of the new control in the sweep update
            ``u <- (1 - theta) u + theta u_hat``.
        max_iters: Maximum number of control updates.
        tol_u: Sup-norm tolerance on the stationarity residual.
        tol_q: Relative tolerance on the objective change between sweeps.
        initial_guess: Constant initial control; ``None`` means ``u_max``.
        adaptive: Halve theta whenever the residual grows.
        min_relaxation: Lower limit for adaptive halving.
        armijo: Sufficient-decrease constant of the line search.
        backtrack: Step reduction factor of the line search.
        max_backtracks: Line-search trials before giving up.
    """

    relaxation: float = 0.5
    max_iters: int = 500
    tol_u: float = 1e-6
    tol_q: float = 1e-8
    initial_guess: Optional[float] = None
    adaptive: bool = True
    min_relaxation: float = 1.0 / 64.0
    armijo: float = 1e-4
    backtrack: float = 0.5
    max_backtracks: int = 40

    def __post_init__(self) -> None:
        if not 0.0 < self.relaxation <= 1.0:
            raise InvalidInputError(
                f"relaxation must lie in (0, 1], got {self.relaxation}"
            )
        if not 0.0 < self.min_relaxation <= 1.0:
            raise InvalidInputError("min_relaxation must lie in (0, 1]")
        for name in ("tol_u", "tol_q", "armijo"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise InvalidInputError(f"{name} must be positive, got {value}")
        if not 0.0 < self.backtrack < 1.0:
            raise InvalidInputError(
                f"backtrack must lie in (0, 1), got {self.backtrack}"
            )
        if self.max_iters < 1 or self.max_backtracks < 1:
            raise InvalidInputError("max_iters and max_backtracks must be at least 1")
        if self.initial_guess is not None and not 0.0 <= self.initial_guess < 1.0:
            raise InvalidInputError(
                f"initial_guess must lie in [0, 1), got {self.initial_guess}"
            )

    def to_dict(self) -> Dict[str, Any]:
        """Settings as plain values (``initial_guess`` omitted when unset)."""
        data = {item.name: getattr(self, item.name) for item in fields(self)}
        if data["initial_guess"] is None:
            del data["initial_guess"]
        return data
