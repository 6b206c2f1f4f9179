"""CSV and TOML writers for trajectories, solutions and summaries.

All floating point values are written with 17 significant digits so that a
file read back reproduces the computed doubles exactly, and repeated runs
with the same configuration produce identical files.
"""

from __future__ import annotations

# Standard library imports
from pathlib import Path
from typing import Any, Dict, Final, Mapping, Optional, Tuple

# Third-party imports
import numpy as np
import pandas as pd
import toml

from .integrators import ControlTrajectory, StateTrajectory
from .ocp import ControlSynthesis
from .paths import ensure_path_exists

CSV_COLUMNS: Final[Tuple[str, ...]] = (
    "t",
    "s",
    "e",
    "i",
    "j",
    "r",
    "n",
    "u",
    "lambda",
    "A",
    "B",
)
FLOAT_FORMAT: Final[str] = "%.17g"


def trajectory_frame(
    states: StateTrajectory,
    control: Optional[ControlTrajectory] = None,
    synthesis: Optional[ControlSynthesis] = None,
) -> pd.DataFrame:
    """Per-node table with the fixed column set.

    ``u`` is 0 for uncontrolled runs. ``lambda`` is empty without a synthesis,
    and ``A`` and ``B`` are empty unless the synthesis carries them (Model 1).
    """
    size = states.grid.n_steps + 1
    blank = np.full(size, np.nan)
    data: Dict[str, np.ndarray] = {"t": states.grid.nodes}
    for k, name in enumerate(CSV_COLUMNS[1:7]):
        data[name] = states.values[:, k]
    data["u"] = control.values if control is not None else np.zeros(size)
    data["lambda"] = blank
    data["A"] = blank
    data["B"] = blank
    if synthesis is not None:
        data["lambda"] = synthesis.indicator
        if synthesis.A is not None:
            data["A"] = synthesis.A
        if synthesis.B is not None:
            data["B"] = synthesis.B
    return pd.DataFrame(data, columns=list(CSV_COLUMNS))


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    """Write a table with the lossless float format; returns ``path``."""
    ensure_path_exists(path)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="")
    return path


def read_csv(path: Path) -> pd.DataFrame:
    """Read a table written by :func:`write_csv`."""
    return pd.read_csv(path, float_precision="round_trip")


def _plain(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    return value


def write_toml(data: Mapping[str, Any], path: Path) -> Path:
    """Write a nested mapping as TOML; returns ``path``."""
    ensure_path_exists(path)
    # Atomic write with temporary file
    temp_file = path.with_suffix(".tmp")
    with open(temp_file, "w", encoding="utf-8") as f:
        toml.dump(_plain(data), f)
    temp_file.replace(path)
    return path
