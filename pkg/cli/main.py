"""Pontrol CLI - Optimal quarantine policies for SEIR epidemic models."""

# Standard library imports
import logging
from typing import Any

# Third-party imports
import typer
from rich.console import Console
from rich.logging import RichHandler

# First-party imports
from pontrol import __version__

from .commands import defaults, simulate, solve, sweep, verify

# Initialize Rich console for pretty output
console = Console()

# Default options to avoid B008 flake8 warnings
VERBOSE_OPTION = typer.Option(False, "--verbose", "-v", help="Enable verbose output")
DEBUG_OPTION = typer.Option(False, "--debug", help="Log every solver iteration")

# Create the main Typer app
app = typer.Typer(
    name="pontrol",
    help="Optimal quarantine policies for SEIR epidemic models.",
    add_completion=True,
    rich_markup_mode="rich",
)

# Scenario commands
app.command(name="simulate", help="Simulate a scenario without control")(
    simulate.simulate
)
app.command(name="solve", help="Solve the optimal control problem")(solve.solve)
app.command(name="sweep", help="Run a matrix of scenarios")(sweep.sweep)
app.command(name="verify", help="Run the verification probes")(verify.verify)
app.command(name="gradcheck", help="Check costate gradients numerically")(
    verify.gradcheck
)
app.command(name="print-defaults", help="Print the default configuration")(
    defaults.print_defaults
)


@app.command()
def version() -> Any:
    """Show the pontrol version."""
    console.print(f"pontrol version {__version__}")


def configure_logging(verbose: bool, debug: bool) -> None:
    """Route library logging through rich at the requested level."""
    level = logging.WARNING
    if verbose:
        level = logging.INFO
    if debug:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


@app.callback()
def main(
    ctx: typer.Context,
    verbose: bool = VERBOSE_OPTION,
    debug: bool = DEBUG_OPTION,
) -> Any:
    """
    Pontrol CLI - Optimal quarantine policies for SEIR epidemic models.

    Use 'pontrol COMMAND --help' for more information on a command.
    """
    configure_logging(verbose, debug)
    # Store flags in context for use by subcommands
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    ctx.obj["debug"] = debug


if __name__ == "__main__":
    app()
