"""Path management utilities for Pontrol.

This module provides centralized path generation for:
- Simulation and solution CSV files
- TOML run reports
- Sweep summaries and per-cell outputs
"""

# Standard library imports
import re
from pathlib import Path
from typing import Final

# Default paths
DEFAULT_OUTPUT_DIR: Final[Path] = Path("results")

TRAJECTORY_FILENAME: Final[str] = "trajectory.csv"
PEAK_FILENAME: Final[str] = "peak.toml"
SOLUTION_FILENAME: Final[str] = "solution.csv"
REPORT_FILENAME: Final[str] = "report.toml"
SUMMARY_FILENAME: Final[str] = "summary.csv"
VERIFY_FILENAME: Final[str] = "verify.toml"
CELLS_DIRNAME: Final[str] = "cells"


def sanitize_filename(filename: str, max_length: int = 80) -> str:
    """Sanitize a string for use as a filename.

    Args:
        filename: String to sanitize
        max_length: Maximum length of the result

    Returns:
        Sanitized filename safe for all platforms

    Raises:
        ValueError: If filename is empty after sanitization

    Examples:
        >>> sanitize_filename("model1 r3/T60")
        'model1_r3_T60'
    """
    if not filename:
        raise ValueError("Filename cannot be empty")

    sanitized = "".join(
        c if c.isalnum() or c in " -_." else "_" for c in filename
    ).strip()
    sanitized = re.sub(r"[_\s]+", "_", sanitized)

    if len(sanitized) > max_length:
        sanitized = sanitized[:max_length].rstrip("_")

    if not sanitized:
        raise ValueError("Filename is empty after sanitization")
    return sanitized


def get_cell_path(base_dir: Path, cell_key: str) -> Path:
    """CSV file of one sweep cell inside ``base_dir/cells``."""
    return base_dir / CELLS_DIRNAME / f"{sanitize_filename(cell_key)}.csv"


def ensure_path_exists(path: Path) -> None:
    """Ensure a path and its parent directories exist.

    Args:
        path: Path to create (if it's a file, only parent dirs are created)
    """
    if path.suffix:
        path.parent.mkdir(parents=True, exist_ok=True)
    else:
        path.mkdir(parents=True, exist_ok=True)
