"""Uncontrolled simulation command."""

# Standard library imports
from pathlib import Path
from typing import Any, Optional

# Third-party imports
import typer
from rich.progress import Progress, SpinnerColumn, TextColumn

# First-party imports
from pontrol.cli_utils import EXIT_INTEGRATION_FAILURE
from pontrol.display import summary_table
from pontrol.models import ModelError
from pontrol.runner import run_simulate

from .common import (
    CONFIG_OPTION,
    HORIZON_OPTION,
    MODEL_OPTION,
    OUT_OPTION,
    R0_OPTION,
    STEPS_OPTION,
    console,
    load_scenario,
)


def simulate(
    config_file: Optional[Path] = CONFIG_OPTION,
    model: Optional[int] = MODEL_OPTION,
    r0: Optional[float] = R0_OPTION,
    horizon: Optional[float] = HORIZON_OPTION,
    steps: Optional[int] = STEPS_OPTION,
    out: Optional[Path] = OUT_OPTION,
) -> Any:
    """Integrate a scenario without quarantine and report the epidemic peak.

    Exits with code 3 when the integration fails, the code also used for
    solver non-convergence.
    """
    config = load_scenario(
        config_file, model=model, r0=r0, horizon=horizon, steps=steps, out=out
    )

    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        transient=True,
    ) as progress:
        progress.add_task(description="Integrating...", total=None)
        try:
            result = run_simulate(config)
        except ModelError as e:
            console.print(f"[red]✗ Integration failed: {e}[/red]")
            raise typer.Exit(EXIT_INTEGRATION_FAILURE) from e

    console.print(summary_table(result.summary(), f"Simulation {result.key}"))
    console.print(
        f"Peak of i+j: day [cyan]{result.peak_day:.2f}[/cyan], "
        f"value [cyan]{result.peak_value:.6f}[/cyan]"
    )
    console.print(f"[green]✓ Trajectory saved to: {result.trajectory_path}[/green]")
