"""Optimal control solve command."""

# Standard library imports
from pathlib import Path
from typing import Any, Optional

# Third-party imports
import typer
from rich.progress import Progress, SpinnerColumn, TextColumn

# First-party imports
from pontrol.cli_utils import EXIT_NOT_CONVERGED, solve_exit_code
from pontrol.display import get_status_color, summary_table
from pontrol.runner import run_solve
from pontrol.solvers import SolverKind

from .common import (
    CONFIG_OPTION,
    HORIZON_OPTION,
    MODEL_OPTION,
    OUT_OPTION,
    R0_OPTION,
    SOLVER_OPTION,
    STEPS_OPTION,
    console,
    load_scenario,
)


def solve(
    config_file: Optional[Path] = CONFIG_OPTION,
    model: Optional[int] = MODEL_OPTION,
    r0: Optional[float] = R0_OPTION,
    horizon: Optional[float] = HORIZON_OPTION,
    steps: Optional[int] = STEPS_OPTION,
    solver: Optional[SolverKind] = SOLVER_OPTION,
    out: Optional[Path] = OUT_OPTION,
) -> Any:
    """Compute the optimal quarantine policy of a scenario."""
    config = load_scenario(
        config_file,
        model=model,
        r0=r0,
        horizon=horizon,
        steps=steps,
        solver=solver,
        out=out,
    )

    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        transient=True,
    ) as progress:
        progress.add_task(
            description=f"Solving with {config.solver.value}...", total=None
        )
        outcome = run_solve(config)

    if outcome.report is None:
        console.print(f"[red]✗ Solve failed: {outcome.error}[/red]")
        console.print(f"[dim]Report saved to: {outcome.report_path}[/dim]")
        raise typer.Exit(EXIT_NOT_CONVERGED)

    report = outcome.report
    console.print(summary_table(report.summary(), f"Solution {outcome.key}"))
    for name, probe in report.lemma_probes.items():
        color = get_status_color(probe.passed, probe.vacuous)
        status = "pass" if probe.passed else "fail"
        console.print(f"[{color}]{name}: {status}[/{color}]")

    if outcome.converged:
        console.print(f"[green]✓ Solution saved to: {outcome.solution_path}[/green]")
    else:
        console.print(
            f"[yellow]⚠ Not converged after {report.iterations} iterations "
            f"(residual {report.stationarity_residual:.3e}); "
            f"partial solution saved to: {outcome.solution_path}[/yellow]"
        )
    console.print(f"[dim]Report saved to: {outcome.report_path}[/dim]")
    raise typer.Exit(solve_exit_code(outcome.converged))
