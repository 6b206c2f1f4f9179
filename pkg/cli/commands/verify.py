"""Probe suite commands."""

# Standard library imports
from pathlib import Path
from typing import Any, List, Optional

# Third-party imports
import typer
from rich.progress import Progress, SpinnerColumn, TextColumn

# First-party imports
from pontrol.cli_utils import EXIT_CONFIG_ERROR, verify_exit_code
from pontrol.config import ConfigError, ScenarioConfig
from pontrol.display import probe_table
from pontrol.runner import VERIFY_GROUPS, run_verify
from pontrol.solvers import SolverKind
from pontrol.verification import ProbeSuite

from .common import (
    CONFIG_OPTION,
    HORIZON_OPTION,
    MODEL_OPTION,
    OUT_OPTION,
    R0_OPTION,
    SEED_OPTION,
    SOLVER_OPTION,
    STEPS_OPTION,
    console,
    load_scenario,
)

ONLY_OPTION = typer.Option(
    None,
    "--only",
    help=f"Run only this probe group (repeatable): {', '.join(VERIFY_GROUPS)}",
)
INJECT_DEFECT_OPTION = typer.Option(
    False, "--inject-defect", hidden=True, help="Corrupt trajectories before probing"
)
DIRECTIONS_OPTION = typer.Option(
    None, "--directions", "-d", help="Random directions per model"
)


def _run(
    config: ScenarioConfig,
    only: Optional[List[str]],
    inject_defect: bool = False,
    directions: Optional[int] = None,
) -> ProbeSuite:
    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        transient=True,
    ) as progress:
        progress.add_task(description="Running probes...", total=None)
        try:
            return run_verify(
                config, only=only, inject_defect=inject_defect, directions=directions
            )
        except ConfigError as e:
            console.print(f"[red]✗ {e}[/red]")
            raise typer.Exit(EXIT_CONFIG_ERROR) from e


def _finish(suite: ProbeSuite) -> None:
    console.print(probe_table(suite))
    for failure in suite.failures():
        console.print(f"[red]✗ {failure.name}[/red]")
        for detail in failure.details:
            console.print(f"  [dim]{detail}[/dim]")
    if suite.passed:
        console.print("[green]✓ All probes passed[/green]")
    else:
        console.print(f"[red]✗ {len(suite.failures())} probe(s) failed[/red]")
    raise typer.Exit(verify_exit_code(suite.passed))


def verify(
    config_file: Optional[Path] = CONFIG_OPTION,
    model: Optional[int] = MODEL_OPTION,
    r0: Optional[float] = R0_OPTION,
    horizon: Optional[float] = HORIZON_OPTION,
    steps: Optional[int] = STEPS_OPTION,
    solver: Optional[SolverKind] = SOLVER_OPTION,
    seed: Optional[int] = SEED_OPTION,
    out: Optional[Path] = OUT_OPTION,
    only: Optional[List[str]] = ONLY_OPTION,
    inject_defect: bool = INJECT_DEFECT_OPTION,
) -> Any:
    """Run the verification probes and exit non-zero if any fails."""
    config = load_scenario(
        config_file,
        model=model,
        r0=r0,
        horizon=horizon,
        steps=steps,
        solver=solver,
        seed=seed,
        out=out,
    )
    _finish(_run(config, only, inject_defect=inject_defect))


def gradcheck(
    config_file: Optional[Path] = CONFIG_OPTION,
    r0: Optional[float] = R0_OPTION,
    horizon: Optional[float] = HORIZON_OPTION,
    steps: Optional[int] = STEPS_OPTION,
    seed: Optional[int] = SEED_OPTION,
    out: Optional[Path] = OUT_OPTION,
    directions: Optional[int] = DIRECTIONS_OPTION,
) -> Any:
    """Compare costate gradients with finite differences for both models."""
    config = load_scenario(
        config_file, r0=r0, horizon=horizon, steps=steps, seed=seed, out=out
    )
    _finish(_run(config, ["gradient"], directions=directions))
