"""Scenario matrix command."""

# Standard library imports
from pathlib import Path
from typing import Any, Optional

# Third-party imports
from rich.progress import Progress, SpinnerColumn, TextColumn

# First-party imports
from pontrol.display import sweep_table
from pontrol.runner import run_sweep
from pontrol.solvers import SolverKind

from .common import (
    CONFIG_OPTION,
    OUT_OPTION,
    SOLVER_OPTION,
    STEPS_OPTION,
    console,
    load_scenario,
)


def sweep(
    config_file: Optional[Path] = CONFIG_OPTION,
    steps: Optional[int] = STEPS_OPTION,
    solver: Optional[SolverKind] = SOLVER_OPTION,
    out: Optional[Path] = OUT_OPTION,
) -> Any:
    """Run every (horizon, R0, model, control) cell of the configured sweep."""
    config = load_scenario(config_file, steps=steps, solver=solver, out=out)
    cells = config.sweep.cells()

    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        transient=True,
    ) as progress:
        progress.add_task(description=f"Running {len(cells)} cells...", total=None)
        result = run_sweep(config)

    console.print(sweep_table(result.frame))
    failures = result.failures
    if not failures.empty:
        console.print(f"[yellow]⚠ {len(failures)} cell(s) failed[/yellow]")
    console.print(f"[green]✓ Summary saved to: {result.summary_path}[/green]")
