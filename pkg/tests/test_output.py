"""Tests for output paths and file writers."""

# Standard library imports
import tempfile
from pathlib import Path

# Third-party imports
import numpy as np
import pytest
import toml

# First-party imports
from pontrol.integrators import TimeGrid
from pontrol.models import ModelKind
from pontrol.ocp import OcpProblem, control_indicators
from pontrol.output import (
    CSV_COLUMNS,
    read_csv,
    trajectory_frame,
    write_csv,
    write_toml,
)
from pontrol.paths import ensure_path_exists, get_cell_path, sanitize_filename


class TestPaths:
    """Test path helpers."""

    def test_sanitize_filename(self):
        """Should replace unsafe characters and collapse separators."""
        assert sanitize_filename("model1 r3/T60") == "model1_r3_T60"
        assert sanitize_filename("a" * 100, max_length=10) == "a" * 10

    def test_sanitize_rejects_empty(self):
        """Should raise ValueError for empty names."""
        with pytest.raises(ValueError, match="cannot be empty"):
            sanitize_filename("")
        with pytest.raises(ValueError, match="empty after sanitization"):
            sanitize_filename("   ")

    def test_cell_path(self):
        """Should place cell tables under cells/."""
        path = get_cell_path(Path("results"), "model1_r3_T60_controlled")
        assert path == Path("results") / "cells" / "model1_r3_T60_controlled.csv"

    def test_ensure_path_exists(self):
        """Should create parents of files and directories themselves."""
        with tempfile.TemporaryDirectory() as tmpdir:
            file_path = Path(tmpdir) / "a" / "b.csv"
            dir_path = Path(tmpdir) / "c" / "d"
            ensure_path_exists(file_path)
            ensure_path_exists(dir_path)
            assert file_path.parent.is_dir()
            assert not file_path.exists()
            assert dir_path.is_dir()


class TestTrajectoryFrame:
    """Test the per-node table."""

    def test_uncontrolled_columns(self):
        """Should fill u with zeros and leave indicator columns blank."""
        problem = OcpProblem(ModelKind.MODEL1, grid=TimeGrid(10.0, 20))
        frame = trajectory_frame(problem.simulate(None))
        assert tuple(frame.columns) == CSV_COLUMNS
        assert len(frame) == 21
        assert np.all(frame["u"] == 0.0)
        assert frame["lambda"].isna().all()
        assert frame["A"].isna().all()

    def test_model2_solution_has_no_coefficients(self):
        """Should write the indicator but leave A and B blank for Model 2."""
        problem = OcpProblem(ModelKind.MODEL2, grid=TimeGrid(10.0, 20))
        control = problem.constant_control(0.5)
        states = problem.simulate(control)
        synthesis = control_indicators(
            problem, states, problem.costates(states, control)
        )
        frame = trajectory_frame(states, control, synthesis)
        assert np.all(frame["u"] == 0.5)
        assert frame["lambda"].notna().all()
        assert frame["B"].isna().all()


class TestWriters:
    """Test CSV and TOML writers."""

    def test_csv_is_lossless(self):
        """Should read back exactly the written doubles."""
        problem = OcpProblem(ModelKind.MODEL1, grid=TimeGrid(10.0, 20))
        frame = trajectory_frame(problem.simulate(None))
        with tempfile.TemporaryDirectory() as tmpdir:
            path = write_csv(frame, Path(tmpdir) / "nested" / "trajectory.csv")
            loaded = read_csv(path)
        assert np.array_equal(loaded["i"].to_numpy(), frame["i"].to_numpy())
        assert np.array_equal(loaded["t"].to_numpy(), frame["t"].to_numpy())
        assert loaded["lambda"].isna().all()

    def test_toml_converts_numpy_and_paths(self):
        """Should write numpy scalars, tuples and paths as plain TOML values."""
        data = {
            "run": {
                "value": np.float64(0.25),
                "count": np.int64(3),
                "pair": (1.0, 2.0),
                "where": Path("results"),
            }
        }
        with tempfile.TemporaryDirectory() as tmpdir:
            path = write_toml(data, Path(tmpdir) / "report.toml")
            loaded = toml.load(path)
            assert not (Path(tmpdir) / "report.tmp").exists()
        assert loaded == {
            "run": {"value": 0.25, "count": 3, "pair": [1.0, 2.0], "where": "results"}
        }
