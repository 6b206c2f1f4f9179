"""Options and helpers shared by the scenario commands."""

# Standard library imports
from pathlib import Path
from typing import Optional

# Third-party imports
import typer
from rich.console import Console

# First-party imports
from pontrol.cli_utils import EXIT_CONFIG_ERROR
from pontrol.config import ConfigError, ScenarioConfig, apply_overrides, load_config
from pontrol.models import ModelError
from pontrol.solvers import SolverKind

# Initialize console for rich output
console = Console()

# Define option constants
CONFIG_OPTION = typer.Option(
    None, "--config", "-c", help="Path to a scenario TOML file"
)
MODEL_OPTION = typer.Option(None, "--model", "-m", help="Model kind (1 or 2)")
R0_OPTION = typer.Option(None, "--r0", help="Basic reproduction number")
HORIZON_OPTION = typer.Option(None, "--horizon", "-T", help="Horizon in days")
STEPS_OPTION = typer.Option(None, "--steps", "-n", help="Number of RK4 steps")
SOLVER_OPTION = typer.Option(None, "--solver", "-s", help="Solver (fbsm or pgrad)")
SEED_OPTION = typer.Option(None, "--seed", help="Seed for randomized probes")
OUT_OPTION = typer.Option(None, "--out", "-o", help="Output directory")


def load_scenario(
    config_file: Optional[Path],
    *,
    model: Optional[int] = None,
    r0: Optional[float] = None,
    horizon: Optional[float] = None,
    steps: Optional[int] = None,
    solver: Optional[SolverKind] = None,
    seed: Optional[int] = None,
    out: Optional[Path] = None,
) -> ScenarioConfig:
    """Load the scenario file, apply flags and exit with code 2 on errors."""
    try:
        config = load_config(config_file)
        config = apply_overrides(
            config,
            model=model,
            r0=r0,
            horizon=horizon,
            steps=steps,
            solver=solver,
            seed=seed,
            out=out,
        )
    except (ConfigError, ModelError) as e:
        console.print(f"[red]✗ Invalid configuration: {e}[/red]")
        raise typer.Exit(EXIT_CONFIG_ERROR) from e
    return config
