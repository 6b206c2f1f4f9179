"""Display utilities for terminal output.

This module builds the rich tables printed by the command-line front end and
the colour helpers used to mark passes and failures.
"""

from __future__ import annotations

# Standard library imports
import math
from typing import Any, Mapping

# Third-party imports
import pandas as pd
from rich import box
from rich.table import Table

from .verification import ProbeReport, ProbeSuite


def get_status_color(passed: bool, vacuous: bool = False) -> str:
    """Get color for a pass/fail status.

    Args:
        passed: Whether the check passed
        vacuous: Whether the pass had no substantive trials

    Returns:
        Color string for rich console display
    """
    if not passed:
        return "red"
    if vacuous:
        return "yellow"
    return "green"


def format_value(value: Any) -> str:
    """Format a scalar for a table cell.

    Examples:
        >>> format_value(0.0089504991)
        '8.950499e-03'
        >>> format_value(True)
        'yes'
    """
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        if math.isnan(value):
            return "-"
        return f"{value:.6e}"
    return str(value)


def _status_label(report: ProbeReport) -> str:
    color = get_status_color(report.passed, report.vacuous)
    if not report.passed:
        label = "✗ fail"
    elif report.vacuous:
        label = "⚠ vacuous"
    else:
        label = "✓ pass"
    return f"[{color}]{label}[/{color}]"


def probe_table(suite: ProbeSuite, title: str = "Verification probes") -> Table:
    """One row per probe with trials, violations and worst residual."""
    table = Table(
        title=title, show_header=True, header_style="bold cyan", box=box.ROUNDED
    )
    table.add_column("Probe", style="bold")
    table.add_column("Status")
    table.add_column("Trials", justify="right")
    table.add_column("Violations", justify="right")
    table.add_column("Worst residual", justify="right")
    for report in suite.reports:
        table.add_row(
            report.name,
            _status_label(report),
            str(report.trials),
            str(report.violations),
            format_value(float(report.worst_residual)),
        )
    return table


def summary_table(summary: Mapping[str, Any], title: str) -> Table:
    """Two-column key/value table of a flat result mapping."""
    table = Table(
        title=title, show_header=True, header_style="bold cyan", box=box.ROUNDED
    )
    table.add_column("Quantity", style="bold")
    table.add_column("Value", justify="right")
    for key, value in summary.items():
        table.add_row(key, format_value(value))
    return table


def sweep_table(frame: pd.DataFrame) -> Table:
    """Infected fraction at the horizon, one row per (T, R0).

    Columns pair the controlled and uncontrolled values of each model. Cells
    that failed show their error text in red.
    """
    table = Table(
        title="i(T) + j(T)",
        show_header=True,
        header_style="bold cyan",
        box=box.ROUNDED,
    )
    table.add_column("T", justify="right")
    table.add_column("R0", justify="right")
    columns = sorted(
        {(int(m), bool(c)) for m, c in zip(frame["model"], frame["controlled"])},
        key=lambda mc: (mc[0], not mc[1]),
    )
    for model, controlled in columns:
        mode = "OCP" if controlled else "free"
        table.add_column(f"Model-{model} {mode}", justify="right")

    for (horizon, r0), group in frame.groupby(["horizon", "r0"], sort=True):
        cells = []
        for model, controlled in columns:
            mask = (group["model"] == model) & (group["controlled"] == controlled)
            row = group[mask]
            if row.empty:
                cells.append("-")
                continue
            record = row.iloc[0]
            error = record.get("error")
            text = format_value(float(record["infected_terminal"]))
            if isinstance(error, str) and error:
                cells.append(f"[red]{error}[/red]")
            elif controlled and not bool(record["converged"]):
                cells.append(f"[yellow]{text}[/yellow]")
            else:
                cells.append(text)
        table.add_row(f"{horizon:g}", f"{r0:g}", *cells)
    return table
