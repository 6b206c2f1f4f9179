"""Tests for the RK4 state and costate integrators."""

# Third-party imports
import numpy as np
import pytest

# First-party imports
from pontrol.integrators import (
    ControlTrajectory,
    StateTrajectory,
    TimeGrid,
    integrate_adjoint_backward,
    integrate_forward,
    step_refinement_check,
)
from pontrol.models import (
    AdjointState,
    IntegrationError,
    InvalidControlError,
    InvalidInputError,
    ModelKind,
    NormalizedState,
    ObjectiveWeights,
)
from pontrol.reproduction import (
    REFERENCE_R0_TABLE,
    reference_initial_state,
    reference_params,
)

INFECTION_FREE = NormalizedState(s=1.0, e=0.0, i=0.0, j=0.0, r=0.0, n=1.0)


class TestTimeGrid:
    """Test the uniform grid."""

    def test_nodes_and_step(self):
        """Should place n_steps + 1 equally spaced nodes on [0, T]."""
        grid = TimeGrid(60.0, 300)
        assert grid.step == pytest.approx(0.2)
        assert grid.nodes.shape == (301,)
        assert grid.nodes[0] == 0.0
        assert grid.nodes[-1] == 60.0

    def test_refine(self):
        """Should double the number of steps on the same horizon."""
        assert TimeGrid(30.0, 100).refine() == TimeGrid(30.0, 200)

    @pytest.mark.parametrize("horizon,steps", [(0.0, 10), (-5.0, 10), (10.0, 1)])
    def test_rejects_degenerate_grid(self, horizon, steps):
        """Should require T > 0 and at least two steps."""
        with pytest.raises(InvalidInputError):
            TimeGrid(horizon, steps)


class TestControlTrajectory:
    """Test control validation and resampling."""

    def test_rejects_values_outside_unit_interval(self):
        """Should raise InvalidControlError for values outside [0, 1)."""
        grid = TimeGrid(10.0, 4)
        with pytest.raises(InvalidControlError):
            ControlTrajectory(grid, np.array([0.0, 0.5, 1.0, 0.5, 0.0]))
        with pytest.raises(InvalidControlError):
            ControlTrajectory(grid, np.array([0.0, -0.1, 0.0, 0.0, 0.0]))
        with pytest.raises(InvalidControlError):
            ControlTrajectory(grid, np.array([0.0, np.nan, 0.0, 0.0, 0.0]))

    def test_rejects_wrong_length(self):
        """Should require one value per node."""
        with pytest.raises(InvalidInputError, match="shape"):
            ControlTrajectory(TimeGrid(10.0, 4), np.zeros(3))

    def test_resample_is_linear(self):
        """Should interpolate linearly onto a finer grid."""
        coarse = ControlTrajectory(TimeGrid(10.0, 2), np.array([0.0, 0.4, 0.8]))
        fine = coarse.resample(TimeGrid(10.0, 4))
        assert fine.values == pytest.approx([0.0, 0.2, 0.4, 0.6, 0.8])
        assert fine.max_jump() == pytest.approx(0.2)


class TestIntegrateForward:
    """Test the forward state integration."""

    def test_infection_free_state_stays_put(self):
        """Should keep the infection-free state constant."""
        grid = TimeGrid(60.0, 120)
        for kind in ModelKind:
            traj = integrate_forward(
                kind, reference_params(), INFECTION_FREE, None, grid
            )
            assert np.all(traj.values == INFECTION_FREE.as_tuple())
            assert traj.peak() == (0.0, 0.0)

    @pytest.mark.parametrize("kind", list(ModelKind))
    @pytest.mark.parametrize("u", [0.0, 0.9])
    def test_conservation_and_positivity(self, kind, u):
        """Should keep every compartment non-negative and conserve the total."""
        grid = TimeGrid(120.0, 600)
        control = ControlTrajectory.constant(grid, u)
        traj = integrate_forward(
            kind, reference_params(6.0), reference_initial_state(), control, grid
        )
        assert traj.values.min() >= -1e-9
        assert traj.conservation_residual().max() <= 1e-9
        assert np.all(np.diff(traj.n) <= 1e-12)

    def test_quarantine_lowers_infections(self):
        """Should end with fewer infected under constant quarantine."""
        grid = TimeGrid(60.0, 300)
        params = reference_params(3.0)
        ic = reference_initial_state()
        free = integrate_forward(ModelKind.MODEL1, params, ic, None, grid)
        controlled = integrate_forward(
            ModelKind.MODEL1, params, ic, ControlTrajectory.constant(grid, 0.5), grid
        )
        assert controlled.infected()[-1] < free.infected()[-1]

    def test_rejects_control_on_other_grid(self):
        """Should refuse a control stored on a different grid."""
        grid = TimeGrid(60.0, 100)
        control = ControlTrajectory.zeros(TimeGrid(60.0, 50))
        with pytest.raises(InvalidInputError):
            integrate_forward(
                ModelKind.MODEL1,
                reference_params(),
                reference_initial_state(),
                control,
                grid,
            )

    def test_rejects_invalid_initial_state(self):
        """Should validate the initial state."""
        bad = NormalizedState(s=0.5, e=0.0, i=0.0, j=0.0, r=0.0, n=1.0)
        with pytest.raises(InvalidInputError):
            integrate_forward(
                ModelKind.MODEL1, reference_params(), bad, None, TimeGrid(10.0, 10)
            )

    def test_reports_blow_up(self):
        """Should raise IntegrationError when a step overshoots below zero."""
        params = reference_params().with_betas(400.0, 40.0)
        ic = NormalizedState(s=0.5, e=0.0, i=0.5, j=0.0, r=0.0, n=1.0)
        with pytest.raises(IntegrationError):
            integrate_forward(ModelKind.MODEL1, params, ic, None, TimeGrid(10.0, 2))


class TestIntegrateAdjoint:
    """Test the backward costate integration."""

    @pytest.mark.parametrize("kind", list(ModelKind))
    def test_terminal_values(self, kind):
        """Should start from the transversality data at T."""
        grid = TimeGrid(30.0, 150)
        weights = ObjectiveWeights()
        params = reference_params()
        control = ControlTrajectory.constant(grid, 0.5)
        states = integrate_forward(
            kind, params, reference_initial_state(), control, grid
        )
        adjoints = integrate_adjoint_backward(kind, params, weights, states, control)
        terminal = AdjointState.terminal(kind, weights)
        assert tuple(adjoints.values[-1]) == terminal.values
        assert adjoints.values.shape == (151, kind.adjoint_dim)
        assert np.all(np.isfinite(adjoints.values))

    def test_zero_weights_give_zero_costates(self):
        """Should stay at zero when the cost ignores infections."""
        grid = TimeGrid(30.0, 60)
        weights = ObjectiveWeights(alpha1=0.0, alpha2=0.0)
        params = reference_params()
        control = ControlTrajectory.zeros(grid)
        states = integrate_forward(
            ModelKind.MODEL2, params, reference_initial_state(), control, grid
        )
        adjoints = integrate_adjoint_backward(
            ModelKind.MODEL2, params, weights, states, control
        )
        assert np.all(adjoints.values == 0.0)


class TestRefinement:
    """Test the step-halving convergence check."""

    @pytest.mark.parametrize("kind", list(ModelKind))
    def test_observed_order_is_four(self, kind):
        """Should observe RK4 order of at least 3.5 on a smooth problem."""
        report = step_refinement_check(
            kind,
            reference_params(3.0),
            reference_initial_state(),
            None,
            TimeGrid(60.0, 200),
        )
        assert report.n_steps == 200
        assert report.fine_error < report.coarse_error
        assert report.passed()

    def test_exact_solution_passes(self):
        """Should report infinite order when all grids agree exactly."""
        report = step_refinement_check(
            ModelKind.MODEL1,
            reference_params(),
            INFECTION_FREE,
            None,
            TimeGrid(10.0, 10),
        )
        assert report.fine_error == 0.0
        assert report.passed()


class TestStateTrajectory:
    """Test trajectory helpers."""

    def test_rejects_wrong_shape(self):
        """Should require one six-component row per node."""
        with pytest.raises(InvalidInputError, match="shape"):
            StateTrajectory(TimeGrid(10.0, 4), np.zeros((5, 5)))

    def test_peak_and_accessors(self):
        """Should locate the maximum of i + j."""
        grid = TimeGrid(4.0, 4)
        values = np.zeros((5, 6))
        values[:, 0] = 1.0
        values[:, 5] = 1.0
        values[2, 2] = 0.1
        values[2, 0] = 0.9
        traj = StateTrajectory(grid, values)
        assert traj.peak() == (2.0, 0.1)
        assert traj.at(2).i == 0.1
        assert traj.final.s == 1.0
        assert traj.conservation_residual().max() == pytest.approx(0.0, abs=1e-15)


def _uncontrolled(kind, r0, horizon):
    params = reference_params().with_betas(*REFERENCE_R0_TABLE[r0])
    return integrate_forward(
        kind, params, reference_initial_state(), None, TimeGrid(horizon, 5000)
    )


@pytest.mark.slow
class TestUncontrolledReference:
    """Test the uncontrolled epidemic against published end values."""

    @pytest.mark.parametrize(
        "kind,r0,horizon,expected",
        [
            (ModelKind.MODEL1, 3.0, 15.0, 0.000280994),
            (ModelKind.MODEL1, 6.0, 15.0, 0.000800482),
            (ModelKind.MODEL1, 3.0, 30.0, 0.000898117),
            (ModelKind.MODEL1, 6.0, 30.0, 0.008208311),
            (ModelKind.MODEL1, 3.0, 60.0, 0.008950499),
            (ModelKind.MODEL1, 6.0, 60.0, 0.323447058),
            (ModelKind.MODEL1, 3.0, 120.0, 0.222049395),
            (ModelKind.MODEL1, 6.0, 120.0, 0.028793638),
            (ModelKind.MODEL2, 3.0, 15.0, 0.000280994),
            (ModelKind.MODEL2, 6.0, 15.0, 0.000800485),
            (ModelKind.MODEL2, 3.0, 30.0, 0.000898128),
            (ModelKind.MODEL2, 6.0, 30.0, 0.008208734),
            (ModelKind.MODEL2, 3.0, 60.0, 0.008952093),
            (ModelKind.MODEL2, 6.0, 60.0, 0.324043791),
            (ModelKind.MODEL2, 3.0, 120.0, 0.223221149),
            (ModelKind.MODEL2, 6.0, 120.0, 0.028675612),
        ],
    )
    def test_terminal_infections(self, kind, r0, horizon, expected):
        """Should reproduce i(T) + j(T) within 0.5% relative."""
        traj = _uncontrolled(kind, r0, horizon)
        assert traj.infected()[-1] == pytest.approx(expected, rel=5e-3)

    @pytest.mark.parametrize("r0,day,value", [(3.0, 130.0, 0.22), (6.0, 70.0, 0.38)])
    def test_peak(self, r0, day, value):
        """Should place the Model 1 peak of i + j on the published day."""
        peak_day, peak_value = _uncontrolled(ModelKind.MODEL1, r0, 180.0).peak()
        assert peak_day == pytest.approx(day, abs=3.0)
        assert peak_value == pytest.approx(value, abs=0.02)
