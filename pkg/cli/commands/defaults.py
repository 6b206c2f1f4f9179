"""Default configuration command."""

# Standard library imports
from typing import Any

# Third-party imports
import typer

# First-party imports
from pontrol.config import ScenarioConfig, dump_config


def print_defaults() -> Any:
    """Print the default scenario as TOML."""
    typer.echo(dump_config(ScenarioConfig()), nl=False)
