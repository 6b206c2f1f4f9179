"""Scenario configuration files.

A scenario is described by a TOML file whose tables mirror
``configs/default.toml``. Every key is optional and falls back to the
reference scenario; unknown tables or keys are rejected so that typos do not
silently change a run. Command-line flags are applied on top with
:func:`apply_overrides`.

Classes:
    ScenarioConfig: One fully specified scenario.
    SweepMatrix: Horizons, reproduction numbers and models to sweep.
    SweepCell: One entry of a sweep.
    ConfigError: Raised for unreadable or invalid configuration.
"""

from __future__ import annotations

# Standard library imports
import itertools
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Final, List, Mapping, Optional, Tuple

# Third-party imports
import toml

from .integrators import DEFAULT_STEPS, TimeGrid
from .models import (
    ControlBounds,
    EpidemicParams,
    ModelError,
    ModelKind,
    NormalizedState,
    ObjectiveWeights,
)
from .ocp import OcpProblem, Quadrature
from .paths import DEFAULT_OUTPUT_DIR
from .reproduction import DEFAULT_BETA_RATIO, beta_from_r0, reference_initial_state
from .solvers.settings import SolverKind, SweepSettings

SUPPORTED_FORMATS: Final[Tuple[str, ...]] = (".toml",)

KNOWN_KEYS: Final[Dict[str, Tuple[str, ...]]] = {
    "model": ("kind", "r0", "beta1", "beta2", "beta_ratio"),
    "rates": ("gamma", "sigma1", "sigma2", "rho1", "rho2", "q"),
    "initial": ("s", "e", "i", "j", "r"),
    "control": ("u_max", "enabled"),
    "weights": ("alpha1", "alpha2", "alpha3"),
    "grid": ("horizon", "steps"),
    "solver": (
        "name",
        "relaxation",
        "max_iters",
        "tol_u",
        "tol_q",
        "initial_guess",
        "adaptive",
        "quadrature",
    ),
    "output": ("directory",),
    "sweep": ("horizons", "r0", "models", "controlled"),
    "verify": ("seed", "convexity_trials", "gradient_directions"),
}
SETTINGS_KEYS: Final[Tuple[str, ...]] = (
    "relaxation",
    "max_iters",
    "tol_u",
    "tol_q",
    "initial_guess",
    "adaptive",
)


@dataclass(frozen=True)
class ConfigError(Exception):
    """Custom exception for configuration errors.

    Attributes:
        message: Error message describing what went wrong.
        file_path: Path to the configuration file if applicable.
    """

    message: str
    file_path: Optional[Path] = None

    def __str__(self) -> str:
        if self.file_path is not None:
            return f"{self.file_path}: {self.message}"
        return self.message


@dataclass(frozen=True, order=True)
class SweepCell:
    """One scenario of a sweep; ordering gives the merge order of results."""

    horizon: float
    r0: float
    model: ModelKind
    controlled: bool

    @property
    def key(self) -> str:
        """File-name friendly identifier."""
        mode = "controlled" if self.controlled else "uncontrolled"
        return f"model{self.model.value}_r{self.r0:g}_T{self.horizon:g}_{mode}"


@dataclass(frozen=True)
class SweepMatrix:
    """Cartesian product of horizons, reproduction numbers, models and modes.

    Raises:
        ConfigError: If any axis is empty.
    """

    horizons: Tuple[float, ...] = (15.0, 30.0, 60.0, 120.0)
    r0_values: Tuple[float, ...] = (3.0, 6.0)
    models: Tuple[ModelKind, ...] = (ModelKind.MODEL1, ModelKind.MODEL2)
    controlled: Tuple[bool, ...] = (False, True)

    def __post_init__(self) -> None:
        for item in fields(self):
            if len(getattr(self, item.name)) == 0:
                raise ConfigError(f"Sweep axis '{item.name}' is empty")
        positive = all(h > 0.0 for h in self.horizons) and all(
            r > 0.0 for r in self.r0_values
        )
        if not positive:
            raise ConfigError("Sweep horizons and r0 values must be positive")

    def cells(self) -> List[SweepCell]:
        """All cells in sorted order."""
        return sorted(
            SweepCell(float(h), float(r), m, bool(c))
            for h, r, m, c in itertools.product(
                self.horizons, self.r0_values, self.models, self.controlled
            )
        )


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to simulate, solve, sweep or verify one scenario.

    Exactly one of ``r0`` and the explicit pair ``(beta1, beta2)`` is set.

    Raises:
        ConfigError: If the values violate any model invariant.
    """

    model: ModelKind = ModelKind.MODEL1
    r0: Optional[float] = 3.0
    beta1: Optional[float] = None
    beta2: Optional[float] = None
    beta_ratio: float = DEFAULT_BETA_RATIO
    gamma: float = 0.18
    sigma1: float = 0.8
    sigma2: float = 0.2
    rho1: float = 1.0 / 14.0
    rho2: float = 1.0 / 21.0
    q: float = 0.15
    initial: NormalizedState = field(default_factory=reference_initial_state)
    u_max: float = 0.9
    controlled: bool = True
    weights: ObjectiveWeights = field(default_factory=ObjectiveWeights)
    horizon: float = 60.0
    steps: int = DEFAULT_STEPS
    solver: SolverKind = SolverKind.FBSM
    settings: SweepSettings = field(default_factory=SweepSettings)
    quadrature: Quadrature = Quadrature.TRAPEZOID
    output_dir: Path = DEFAULT_OUTPUT_DIR
    seed: int = 0
    convexity_trials: int = 10_000
    gradient_directions: int = 20
    sweep: SweepMatrix = field(default_factory=SweepMatrix)

    def __post_init__(self) -> None:
        explicit = self.beta1 is not None or self.beta2 is not None
        if self.r0 is not None and explicit:
            raise ConfigError("r0 and explicit beta1/beta2 are mutually exclusive")
        if self.r0 is None and (self.beta1 is None or self.beta2 is None):
            raise ConfigError("Give either r0 or both beta1 and beta2")
        if self.convexity_trials < 1 or self.gradient_directions < 1:
            raise ConfigError(
                "convexity_trials and gradient_directions must be >= 1"
            )
        try:
            self.problem()
        except ModelError as e:
            raise ConfigError(str(e)) from e

    def params(self) -> EpidemicParams:
        """Model rates, with betas derived from ``r0`` when it is set."""
        base = EpidemicParams(
            beta1=0.0,
            beta2=0.0,
            gamma=self.gamma,
            sigma1=self.sigma1,
            sigma2=self.sigma2,
            rho1=self.rho1,
            rho2=self.rho2,
            q=self.q,
        )
        if self.r0 is not None:
            return base.with_betas(*beta_from_r0(self.r0, base, self.beta_ratio))
        assert self.beta1 is not None and self.beta2 is not None
        return base.with_betas(self.beta1, self.beta2)

    def grid(self) -> TimeGrid:
        """Integration grid."""
        return TimeGrid(float(self.horizon), int(self.steps))

    def problem(self, kind: Optional[ModelKind] = None) -> OcpProblem:
        """Optimal control problem for this scenario (or another model)."""
        return OcpProblem(
            kind=kind or self.model,
            params=self.params(),
            weights=self.weights,
            bounds=ControlBounds(self.u_max),
            ic=self.initial,
            grid=self.grid(),
            quadrature=self.quadrature,
        )

    def for_cell(self, cell: SweepCell) -> ScenarioConfig:
        """Copy of this scenario for one sweep cell."""
        return replace(
            self,
            model=cell.model,
            r0=cell.r0,
            beta1=None,
            beta2=None,
            horizon=cell.horizon,
            controlled=cell.controlled,
        )

    def to_dict(self) -> Dict[str, Any]:
        """Nested mapping in the layout of the configuration file."""
        model: Dict[str, Any] = {
            "kind": int(self.model.value),
            "beta_ratio": self.beta_ratio,
        }
        if self.r0 is not None:
            model["r0"] = self.r0
        else:
            model["beta1"] = self.beta1
            model["beta2"] = self.beta2
        solver: Dict[str, Any] = {
            "name": self.solver.value,
            "quadrature": self.quadrature.value,
        }
        for key in SETTINGS_KEYS:
            value = getattr(self.settings, key)
            if value is not None:
                solver[key] = value
        return {
            "model": model,
            "rates": {key: getattr(self, key) for key in KNOWN_KEYS["rates"]},
            "initial": {
                key: getattr(self.initial, key) for key in KNOWN_KEYS["initial"]
            },
            "control": {"u_max": self.u_max, "enabled": self.controlled},
            "weights": {
                "alpha1": self.weights.alpha1,
                "alpha2": self.weights.alpha2,
                "alpha3": self.weights.alpha3,
            },
            "grid": {"horizon": self.horizon, "steps": self.steps},
            "solver": solver,
            "output": {"directory": str(self.output_dir)},
            "sweep": {
                "horizons": list(self.sweep.horizons),
                "r0": list(self.sweep.r0_values),
                "models": [int(m.value) for m in self.sweep.models],
                "controlled": list(self.sweep.controlled),
            },
            "verify": {
                "seed": self.seed,
                "convexity_trials": self.convexity_trials,
                "gradient_directions": self.gradient_directions,
            },
        }


def _sweep_defaults(matrix: SweepMatrix) -> Dict[str, Any]:
    return {
        "horizons": matrix.horizons,
        "r0": matrix.r0_values,
        "models": matrix.models,
        "controlled": matrix.controlled,
    }


def _flag(value: Any, name: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{name} takes true or false, got {value!r}")
    return value


def _table(data: Mapping[str, Any], name: str) -> Dict[str, Any]:
    section = data.get(name, {})
    if not isinstance(section, dict):
        raise ConfigError(f"'{name}' must be a table, got {type(section).__name__}")
    unknown = sorted(set(section) - set(KNOWN_KEYS[name]))
    if unknown:
        raise ConfigError(f"Unknown keys in [{name}]: {', '.join(unknown)}")
    return section


def config_from_dict(data: Mapping[str, Any]) -> ScenarioConfig:
    """Build a scenario from a nested mapping (the parsed TOML document).

    Raises:
        ConfigError: For unknown tables or keys, wrong types and invalid values.
    """
    unknown = sorted(set(data) - set(KNOWN_KEYS))
    if unknown:
        raise ConfigError(f"Unknown tables: {', '.join(unknown)}")
    defaults = ScenarioConfig()
    try:
        model = _table(data, "model")
        rates = _table(data, "rates")
        initial = _table(data, "initial")
        control = _table(data, "control")
        weights = _table(data, "weights")
        grid = _table(data, "grid")
        solver = _table(data, "solver")
        output = _table(data, "output")
        sweep = _table(data, "sweep")
        verify = _table(data, "verify")

        explicit = "beta1" in model or "beta2" in model
        r0 = model.get("r0", None if explicit else defaults.r0)
        start = defaults.initial
        start_values = {
            key: float(initial.get(key, getattr(start, key))) for key in "seijr"
        }
        settings_values = {
            key: solver[key]
            for key in SETTINGS_KEYS
            if key in solver
        }
        axes = {**_sweep_defaults(defaults.sweep), **sweep}
        matrix = SweepMatrix(
            horizons=tuple(float(h) for h in axes["horizons"]),
            r0_values=tuple(float(r) for r in axes["r0"]),
            models=tuple(ModelKind.parse(m) for m in axes["models"]),
            controlled=tuple(
                _flag(c, "[sweep] controlled") for c in axes["controlled"]
            ),
        )
        rate_values = {
            key: float(rates.get(key, getattr(defaults, key)))
            for key in KNOWN_KEYS["rates"]
        }
        return ScenarioConfig(
            model=ModelKind.parse(model.get("kind", defaults.model)),
            r0=None if r0 is None else float(r0),
            beta1=float(model["beta1"]) if "beta1" in model else None,
            beta2=float(model["beta2"]) if "beta2" in model else None,
            beta_ratio=float(model.get("beta_ratio", defaults.beta_ratio)),
            **rate_values,
            initial=NormalizedState(n=1.0, **start_values),
            u_max=float(control.get("u_max", defaults.u_max)),
            controlled=_flag(
                control.get("enabled", defaults.controlled), "[control] enabled"
            ),
            weights=ObjectiveWeights(
                alpha1=float(weights.get("alpha1", defaults.weights.alpha1)),
                alpha2=float(weights.get("alpha2", defaults.weights.alpha2)),
                alpha3=float(weights.get("alpha3", defaults.weights.alpha3)),
            ),
            horizon=float(grid.get("horizon", defaults.horizon)),
            steps=int(grid.get("steps", defaults.steps)),
            solver=SolverKind(solver.get("name", defaults.solver.value)),
            settings=SweepSettings(**settings_values),
            quadrature=Quadrature(solver.get("quadrature", defaults.quadrature.value)),
            output_dir=Path(output.get("directory", str(defaults.output_dir))),
            seed=int(verify.get("seed", defaults.seed)),
            convexity_trials=int(
                verify.get("convexity_trials", defaults.convexity_trials)
            ),
            gradient_directions=int(
                verify.get("gradient_directions", defaults.gradient_directions)
            ),
            sweep=matrix,
        )
    except ConfigError:
        raise
    except (ModelError, ValueError, TypeError) as e:
        raise ConfigError(f"Invalid configuration value: {e}") from e


def load_config(config_file: Optional[Path] = None) -> ScenarioConfig:
    """Load a scenario from a TOML file, or the defaults when no file is given.

    Raises:
        ConfigError: If the file is missing, unreadable or invalid.
    """
    if config_file is None:
        return ScenarioConfig()
    if config_file.suffix not in SUPPORTED_FORMATS:
        raise ConfigError(
            f"Unsupported file format: {config_file.suffix}. "
            f"Supported formats: {', '.join(SUPPORTED_FORMATS)}",
            file_path=config_file,
        )
    try:
        with open(config_file, "r", encoding="utf-8") as f:
            data = toml.load(f)
    except FileNotFoundError as e:
        raise ConfigError(
            "Configuration file not found", file_path=config_file
        ) from e
    except toml.TomlDecodeError as e:
        raise ConfigError(f"Failed to parse: {e}", file_path=config_file) from e
    try:
        return config_from_dict(data)
    except ConfigError as e:
        raise ConfigError(e.message, file_path=config_file) from e


def apply_overrides(
    config: ScenarioConfig,
    *,
    model: Optional[int] = None,
    r0: Optional[float] = None,
    horizon: Optional[float] = None,
    steps: Optional[int] = None,
    solver: Optional[SolverKind] = None,
    seed: Optional[int] = None,
    out: Optional[Path] = None,
) -> ScenarioConfig:
    """Apply command-line values on top of a loaded scenario.

    A new ``r0`` replaces explicit betas from the file.

    Raises:
        ConfigError: If the resulting scenario is invalid.
    """
    changes: Dict[str, Any] = {}
    try:
        if model is not None:
            changes["model"] = ModelKind.parse(model)
        if r0 is not None:
            changes.update(r0=float(r0), beta1=None, beta2=None)
        if horizon is not None:
            changes["horizon"] = float(horizon)
        if steps is not None:
            changes["steps"] = int(steps)
        if solver is not None:
            changes["solver"] = SolverKind(solver)
        if seed is not None:
            changes["seed"] = int(seed)
        if out is not None:
            changes["output_dir"] = Path(out)
    except (ModelError, ValueError) as e:
        raise ConfigError(str(e)) from e
    return replace(config, **changes) if changes else config


def dump_config(config: ScenarioConfig) -> str:
    """Render a scenario as TOML text."""
    return toml.dumps(config.to_dict())
