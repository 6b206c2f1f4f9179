"""Library side of the command-line front end.

Each ``run_*`` function takes a :class:`~pontrol.config.ScenarioConfig`, does
the work, writes its files below ``config.output_dir`` and returns a result
object the CLI renders. Nothing in here prints or exits.
"""

from __future__ import annotations

# Standard library imports
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, Final, Iterable, List, Optional, Tuple

# Third-party imports
import numpy as np
import pandas as pd

from .cli_utils import resolve_worker_count
from .config import ConfigError, ScenarioConfig, SweepCell, SweepMatrix
from .integrators import StateTrajectory
from .models import ControlBounds, ModelError, ModelKind
from .output import trajectory_frame, write_csv, write_toml
from .paths import (
    PEAK_FILENAME,
    REPORT_FILENAME,
    SOLUTION_FILENAME,
    SUMMARY_FILENAME,
    TRAJECTORY_FILENAME,
    VERIFY_FILENAME,
    get_cell_path,
)
from .reproduction import critical_control, r0_basic, r0_controlled
from .solvers import SolveReport, solve
from .verification import (
    ProbeReport,
    ProbeSuite,
    probe_conservation,
    probe_continuity,
    probe_convexity,
    probe_gradient,
    probe_lemma1,
    probe_optimality,
    probe_r0_threshold,
    probe_refinement,
    probe_stationarity,
)

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS: Final[Tuple[str, ...]] = (
    "horizon",
    "r0",
    "model",
    "controlled",
    "infected_terminal",
    "converged",
    "iterations",
    "error",
)
VERIFY_GROUPS: Final[Tuple[str, ...]] = (
    "positivity",
    "conservation",
    "refinement",
    "convexity",
    "r0",
    "gradient",
    "solution",
)
REFINEMENT_COARSENING: Final[int] = 20
CELL_ERRORS: Final[Tuple[type, ...]] = (ConfigError, ModelError, ArithmeticError)


def scenario_key(config: ScenarioConfig) -> str:
    """File-name friendly identifier of a scenario."""
    mode = "controlled" if config.controlled else "uncontrolled"
    if config.r0 is not None:
        rate = f"r{config.r0:g}"
    else:
        rate = f"b{config.beta1:g}-{config.beta2:g}"
    return f"model{config.model.value}_{rate}_T{config.horizon:g}_{mode}"


def reproduction_summary(config: ScenarioConfig) -> Dict[str, float]:
    """Reproduction ratios of a scenario and the control that stops growth."""
    params = config.params()
    return {
        "r0_basic": r0_basic(params),
        "r0_controlled_u_max": r0_controlled(config.model, params, config.u_max),
        "critical_control": critical_control(config.model, params),
    }


@dataclass(frozen=True)
class SimulationResult:
    """Uncontrolled trajectory and its epidemic peak."""

    key: str
    states: StateTrajectory
    peak_day: float
    peak_value: float
    trajectory_path: Path
    peak_path: Path

    def summary(self) -> Dict[str, Any]:
        """Flat mapping written to the peak report."""
        final = self.states.final
        return {
            "peak_day": self.peak_day,
            "peak_value": self.peak_value,
            "infected_terminal": final.i + final.j,
            "population_terminal": final.n,
        }


def run_simulate(config: ScenarioConfig) -> SimulationResult:
    """Integrate the scenario without control and write the trajectory.

    The control settings of the scenario are ignored.

    Raises:
        ModelError: If the integration fails.
    """
    if config.controlled:
        logger.info("simulate ignores the control settings of the scenario")
    states = config.problem().simulate(None)
    peak_day, peak_value = states.peak()
    out = config.output_dir
    result = SimulationResult(
        key=scenario_key(replace(config, controlled=False)),
        states=states,
        peak_day=peak_day,
        peak_value=peak_value,
        trajectory_path=out / TRAJECTORY_FILENAME,
        peak_path=out / PEAK_FILENAME,
    )
    write_csv(trajectory_frame(states), result.trajectory_path)
    write_toml(
        {
            "scenario": {"key": result.key},
            "peak": result.summary(),
            "reproduction": reproduction_summary(config),
        },
        result.peak_path,
    )
    logger.info(
        "Peak of i+j at day %.2f with value %.6g", result.peak_day, result.peak_value
    )
    return result


@dataclass(frozen=True)
class SolveOutcome:
    """Result of :func:`run_solve`.

    Attributes:
        key: Scenario identifier.
        report: Solver report, or None if the solve raised.
        solution_path: Written solution table, or None if there was no solution.
        report_path: Written TOML report.
        error: Description of the failure that prevented a report.
    """

    key: str
    report: Optional[SolveReport]
    solution_path: Optional[Path]
    report_path: Path
    error: Optional[str] = None

    @property
    def converged(self) -> bool:
        """True if a report exists and the solver converged."""
        return self.report is not None and self.report.converged


def run_solve(config: ScenarioConfig) -> SolveOutcome:
    """Solve the optimal control problem and write the solution and report.

    Non-convergence still writes both files. A model failure during the solve
    writes a report holding the error and no solution table.
    """
    key = scenario_key(replace(config, controlled=True))
    out = config.output_dir
    report_path = out / REPORT_FILENAME
    header = {"key": key, "solver": config.solver.value}
    try:
        report = solve(config.problem(), config.settings, config.solver)
    except ModelError as e:
        logger.error("Solve of %s failed: %s", key, e)
        write_toml(
            {"scenario": header, "summary": {"converged": False, "error": str(e)}},
            report_path,
        )
        return SolveOutcome(key, None, None, report_path, error=str(e))

    solution_path = write_csv(
        trajectory_frame(report.states, report.u_star, report.synthesis),
        out / SOLUTION_FILENAME,
    )
    write_toml(
        {
            "scenario": header,
            "summary": report.summary(),
            "settings": config.settings.to_dict(),
            "reproduction": reproduction_summary(config),
            "probes": {
                name: probe.to_dict() for name, probe in report.lemma_probes.items()
            },
        },
        report_path,
    )
    return SolveOutcome(key, report, solution_path, report_path)


def _run_cell(task: Tuple[ScenarioConfig, SweepCell]) -> Dict[str, Any]:
    """Run one sweep cell; failures are recorded in the returned row."""
    config, cell = task
    row: Dict[str, Any] = {
        "horizon": cell.horizon,
        "r0": cell.r0,
        "model": int(cell.model.value),
        "controlled": cell.controlled,
        "infected_terminal": math.nan,
        "converged": False,
        "iterations": 0,
        "error": "",
    }
    try:
        scenario = config.for_cell(cell)
        problem = scenario.problem()
        if cell.controlled:
            report = solve(problem, scenario.settings, scenario.solver)
            frame = trajectory_frame(report.states, report.u_star, report.synthesis)
            row.update(
                infected_terminal=report.infected_terminal,
                converged=report.converged,
                iterations=report.iterations,
            )
        else:
            states = problem.simulate(None)
            frame = trajectory_frame(states)
            row.update(infected_terminal=float(states.infected()[-1]), converged=True)
        write_csv(frame, get_cell_path(config.output_dir, cell.key))
    except CELL_ERRORS as e:
        row["error"] = f"{type(e).__name__}: {e}"
    return row


@dataclass(frozen=True)
class SweepResult:
    """Merged sweep table and where it was written."""

    frame: pd.DataFrame
    summary_path: Path
    workers: int

    @property
    def failures(self) -> pd.DataFrame:
        """Rows whose cell raised."""
        return self.frame[self.frame["error"].fillna("") != ""]


def run_sweep(
    config: ScenarioConfig,
    matrix: Optional[SweepMatrix] = None,
    workers: Optional[int] = None,
) -> SweepResult:
    """Run every cell of a sweep on a process pool and merge the rows.

    Rows are merged in sorted cell order, so the summary does not depend on
    which worker finished first.

    Args:
        config: Base scenario; each cell overrides model, r0, horizon and mode.
        matrix: Cells to run (``config.sweep`` by default).
        workers: Pool size (resolved from the environment by default).
    """
    cells = (matrix or config.sweep).cells()
    count = workers if workers is not None else resolve_worker_count(len(cells))
    count = max(1, min(count, len(cells)))
    tasks = [(config, cell) for cell in cells]
    logger.info("Running %d sweep cells on %d workers", len(cells), count)

    rows: Iterable[Dict[str, Any]]
    if count == 1:
        rows = [_run_cell(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=count) as executor:
            rows = list(executor.map(_run_cell, tasks))

    merged: List[Dict[str, Any]] = []
    for cell, row in sorted(zip(cells, rows), key=lambda pair: pair[0]):
        if row["error"]:
            logger.warning("Sweep cell %s failed: %s", cell.key, row["error"])
        else:
            logger.info(
                "Sweep cell %s: i(T)+j(T) = %.9g", cell.key, row["infected_terminal"]
            )
        merged.append(row)

    frame = pd.DataFrame(merged, columns=list(SUMMARY_COLUMNS))
    summary_path = write_csv(frame, config.output_dir / SUMMARY_FILENAME)
    return SweepResult(frame=frame, summary_path=summary_path, workers=count)


def _renamed(report: ProbeReport, suffix: str) -> ProbeReport:
    return replace(report, name=f"{report.name}-{suffix}")


def _corrupt(states: StateTrajectory, seed: int) -> StateTrajectory:
    """Copy of ``states`` with one seeded node pushed below zero."""
    rng = np.random.default_rng(seed)
    values = states.values.copy()
    node = int(rng.integers(1, states.grid.n_steps + 1))
    values[node, 2] = -1e-3
    return StateTrajectory(states.grid, values)


def _trajectory_probes(
    config: ScenarioConfig, groups: Tuple[str, ...], inject_defect: bool
) -> List[ProbeReport]:
    reports = []
    for kind in ModelKind:
        problem = config.problem(kind)
        for label, control in (
            ("free", None),
            ("u-max", problem.constant_control(problem.bounds.u_max)),
        ):
            states = problem.simulate(control)
            if inject_defect:
                states = _corrupt(states, config.seed)
            suffix = f"{kind.label.lower()}-{label}"
            if "positivity" in groups:
                reports.append(_renamed(probe_lemma1(states), suffix))
            if "conservation" in groups:
                reports.append(_renamed(probe_conservation(states), suffix))
    return reports


def _refinement_probes(config: ScenarioConfig) -> List[ProbeReport]:
    coarse_steps = max(2, config.steps // REFINEMENT_COARSENING)
    reports = []
    for kind in ModelKind:
        problem = replace(config, steps=coarse_steps).problem(kind)
        reports.append(_renamed(probe_refinement(problem), kind.label.lower()))
    return reports


def _solution_probes(config: ScenarioConfig) -> List[ProbeReport]:
    problem = config.problem()
    report = solve(problem, config.settings, config.solver)
    fine = solve(
        problem.with_grid(problem.grid.refine(2)), config.settings, config.solver
    )
    reports = list(report.lemma_probes.values())
    reports.append(probe_stationarity(report))
    reports.append(probe_optimality(report))
    reports.append(probe_continuity(report.u_star, fine.u_star))
    if not report.converged:
        reports.append(
            ProbeReport(
                "converged",
                1,
                1,
                report.stationarity_residual,
                details=(f"stopped after {report.iterations} iterations",),
            )
        )
    return reports


def run_verify(
    config: ScenarioConfig,
    only: Optional[Iterable[str]] = None,
    inject_defect: bool = False,
    directions: Optional[int] = None,
) -> ProbeSuite:
    """Run the probe suite and write ``verify.toml``.

    Args:
        config: Scenario the probes run on.
        only: Probe groups to run (all of :data:`VERIFY_GROUPS` by default).
        inject_defect: Corrupt the simulated trajectories with a seeded
            negative value before probing them.
        directions: Gradient directions per model (``config`` value by default).

    Raises:
        ConfigError: If ``only`` names an unknown group.
    """
    groups = tuple(only) if only else VERIFY_GROUPS
    unknown = sorted(set(groups) - set(VERIFY_GROUPS))
    if unknown:
        raise ConfigError(
            f"Unknown probe group(s): {', '.join(unknown)}. "
            f"Choose from: {', '.join(VERIFY_GROUPS)}"
        )
    if inject_defect and not {"positivity", "conservation"} & set(groups):
        groups = groups + ("positivity",)

    reports: List[ProbeReport] = []
    if {"positivity", "conservation"} & set(groups):
        reports.extend(_trajectory_probes(config, groups, inject_defect))
    if "refinement" in groups:
        reports.extend(_refinement_probes(config))
    if "convexity" in groups:
        reports.append(
            probe_convexity(
                trials=config.convexity_trials,
                seed=config.seed,
                bounds=ControlBounds(config.u_max),
                weights=config.weights,
                params=config.params(),
            )
        )
    if "r0" in groups:
        reports.append(probe_r0_threshold(ControlBounds(config.u_max)))
    if "gradient" in groups:
        count = config.gradient_directions if directions is None else directions
        for kind in ModelKind:
            reports.append(
                probe_gradient(config.problem(kind), directions=count, seed=config.seed)
            )
    if "solution" in groups:
        reports.extend(_solution_probes(config))

    suite = ProbeSuite(tuple(reports))
    write_toml(
        {
            "passed": suite.passed,
            "probes": {report.name: report.to_dict() for report in suite.reports},
        },
        config.output_dir / VERIFY_FILENAME,
    )
    for failure in suite.failures():
        logger.warning("Probe %s failed: %s", failure.name, "; ".join(failure.details))
    return suite
