"""Tests for the runtime verification probes."""

# Third-party imports
import numpy as np
import pytest

# First-party imports
from pontrol.integrators import ControlTrajectory, StateTrajectory, TimeGrid
from pontrol.models import ControlBounds, ModelKind, ObjectiveWeights
from pontrol.ocp import HamiltonianCoeffs, OcpProblem
from pontrol.reproduction import REFERENCE_R0_TABLE, reference_params
from pontrol.verification import (
    ProbeReport,
    ProbeSuite,
    check_lemma3,
    convexity_midpoint,
    probe_conservation,
    probe_continuity,
    probe_convexity,
    probe_gradient,
    probe_lemma1,
    probe_r0_threshold,
    probe_refinement,
)


def _reference_trajectory(kind=ModelKind.MODEL1):
    problem = OcpProblem(kind, params=reference_params(6.0), grid=TimeGrid(90.0, 450))
    return problem.simulate(problem.constant_control(0.3))


class TestProbeReport:
    """Test report and suite aggregation."""

    def test_pass_means_no_violations(self):
        """Should pass exactly when no violation was recorded."""
        assert ProbeReport("a", 3, 0, 0.1).passed
        assert not ProbeReport("a", 3, 1, 0.1).passed

    def test_to_dict(self):
        """Should expose every field plus the pass flag."""
        data = ProbeReport("a", 2, 1, 0.5, details=("x",)).to_dict()
        assert data == {
            "name": "a",
            "trials": 2,
            "violations": 1,
            "worst_residual": 0.5,
            "vacuous": False,
            "passed": False,
            "details": ["x"],
        }

    def test_suite_failures(self):
        """Should collect failing reports and count vacuous passes as passes."""
        good = ProbeReport("good", 1, 0, 0.0)
        empty = ProbeReport("empty", 0, 0, 0.0, vacuous=True)
        bad = ProbeReport("bad", 1, 1, 1.0)
        assert ProbeSuite((good, empty)).passed
        suite = ProbeSuite((good, empty, bad))
        assert not suite.passed
        assert suite.failures() == [bad]


class TestLemma1:
    """Test the positivity and conservation probe."""

    @pytest.mark.parametrize("kind", list(ModelKind))
    def test_reference_trajectory_passes(self, kind):
        """Should pass on a clean forward solution."""
        report = probe_lemma1(_reference_trajectory(kind))
        assert report.passed
        assert report.trials == 451
        assert probe_conservation(_reference_trajectory(kind)).passed

    def test_corrupted_trajectory_fails(self):
        """Should flag a node with a negative compartment."""
        trajectory = _reference_trajectory()
        values = trajectory.values.copy()
        values[100, 2] = -1e-3
        report = probe_lemma1(StateTrajectory(trajectory.grid, values))
        assert not report.passed
        assert report.violations == 1
        assert report.worst_residual >= 1e-3
        assert report.details[0].startswith("node 100")

    def test_increasing_population_fails(self):
        """Should flag n growing between nodes."""
        grid = TimeGrid(2.0, 2)
        values = np.array(
            [
                [1.0, 0.0, 0.0, 0.0, 0.0, 1.0],
                [0.9, 0.0, 0.0, 0.0, 0.0, 0.9],
                [0.95, 0.0, 0.0, 0.0, 0.0, 0.95],
            ]
        )
        report = probe_lemma1(StateTrajectory(grid, values))
        assert report.violations == 1


class TestLemma3:
    """Test the negative-curvature check."""

    def test_vacuous_without_negative_curvature(self):
        """Should pass vacuously when A >= 0 everywhere."""
        report = check_lemma3([HamiltonianCoeffs(0.1, 0.3)], ControlBounds(0.9))
        assert report.passed
        assert report.vacuous

    def test_indicator_beyond_half_bound(self):
        """Should require B / (2A) > u_max / 2 wherever A < 0."""
        coeffs = [HamiltonianCoeffs(-0.1, -0.2), HamiltonianCoeffs(-0.1, 0.2)]
        report = check_lemma3(coeffs, ControlBounds(0.9))
        assert report.trials == 2
        assert report.violations == 1
        assert report.worst_residual == pytest.approx(1.45)


class TestConvexity:
    """Test the randomized convexity probe."""

    def test_passes_for_reference_data(self):
        """Should find no violation in 2000 random trials."""
        report = probe_convexity(trials=2000, seed=7)
        assert report.passed
        assert report.trials == 2000

    def test_is_reproducible(self):
        """Should give identical reports for the same seed."""
        first = probe_convexity(trials=100, seed=3)
        assert first == probe_convexity(trials=100, seed=3)

    def test_rejects_zero_trials(self):
        """Should raise ValueError for trials < 1."""
        with pytest.raises(ValueError, match="trials must be at least 1"):
            probe_convexity(trials=0)

    def test_midpoint_interpolates_rate(self):
        """Should solve m w^2 + l w = target for the non-negative root."""
        m = np.array([2.0])
        ell = np.array([0.5])
        w_hat = np.array([0.2])
        w_tilde = np.array([0.8])
        lam = np.array([0.25])
        w_bar = convexity_midpoint(m, ell, w_hat, w_tilde, lam)
        target = 0.25 * (2.0 * 0.04 + 0.1) + 0.75 * (2.0 * 0.64 + 0.4)
        assert 2.0 * w_bar[0] ** 2 + 0.5 * w_bar[0] == pytest.approx(target)
        assert w_bar[0] >= 0.25 * 0.2 + 0.75 * 0.8

    def test_midpoint_of_equal_levels(self):
        """Should return the common level when both contact levels coincide."""
        m = np.array([2.0, 0.3, 1e-4])
        ell = np.array([0.5, 1.0, 0.2])
        w = np.array([0.1, 0.55, 1.0])
        w_bar = convexity_midpoint(m, ell, w, w, np.array([0.0, 0.4, 1.0]))
        np.testing.assert_allclose(w_bar, w, rtol=1e-12)

    def test_midpoint_at_end_weights(self):
        """Should return w_hat at lam = 1 and w_tilde at lam = 0."""
        m = np.array([2.0, 0.3])
        ell = np.array([0.5, 1.0])
        w_hat = np.array([0.2, 0.9])
        w_tilde = np.array([0.8, 0.1])
        ones = np.ones(2)
        np.testing.assert_allclose(
            convexity_midpoint(m, ell, w_hat, w_tilde, ones), w_hat, rtol=1e-12
        )
        np.testing.assert_allclose(
            convexity_midpoint(m, ell, w_hat, w_tilde, 0.0 * ones), w_tilde, rtol=1e-12
        )

    def test_midpoint_without_quadratic_term(self):
        """Should interpolate linearly when m = 0."""
        ell = np.array([0.7])
        w_hat, w_tilde, lam = np.array([0.2]), np.array([0.8]), np.array([0.25])
        w_bar = convexity_midpoint(np.zeros(1), ell, w_hat, w_tilde, lam)
        assert w_bar[0] == pytest.approx(0.25 * 0.2 + 0.75 * 0.8)


class TestReproductionThreshold:
    """Test the controlled reproduction probe."""

    def test_passes_at_default_bound(self):
        """Should bring every reference ratio below 1 at u_max = 0.9."""
        report = probe_r0_threshold()
        assert report.passed
        assert report.trials == 2 * len(REFERENCE_R0_TABLE)
        assert report.worst_residual < 1.0

    def test_fails_for_weak_quarantine(self):
        """Should flag ratios at or above 1 when u_max = 0.1."""
        report = probe_r0_threshold(ControlBounds(0.1))
        assert not report.passed
        assert report.worst_residual >= 1.0


class TestGradientProbe:
    """Test the finite-difference gradient probe."""

    @pytest.mark.parametrize("kind", list(ModelKind))
    def test_costate_gradient_matches_differences(self, kind):
        """Should agree with central differences on a fine grid."""
        problem = OcpProblem(
            kind, params=reference_params(3.0), grid=TimeGrid(15.0, 1500)
        )
        report = probe_gradient(problem, directions=4, seed=1)
        assert report.passed, report.details
        assert report.name == f"gradient-{kind.label.lower()}"

    @pytest.mark.parametrize("kind", list(ModelKind))
    def test_effort_only_cost(self, kind):
        """Should match differences exactly when only the control is charged."""
        problem = OcpProblem(
            kind,
            weights=ObjectiveWeights(alpha1=0.0, alpha2=0.0),
            grid=TimeGrid(10.0, 100),
        )
        report = probe_gradient(problem, directions=6, seed=3)
        assert report.passed, report.details
        assert report.worst_residual < 1e-6

    def test_zero_directions_is_vacuous(self):
        """Should report a vacuous pass for no directions."""
        problem = OcpProblem(ModelKind.MODEL1, grid=TimeGrid(10.0, 20))
        report = probe_gradient(problem, directions=0)
        assert report.vacuous
        assert report.passed


class TestRefinementAndContinuity:
    """Test grid-based probes."""

    def test_refinement_passes_on_smooth_problem(self):
        """Should observe fourth order for the uncontrolled flow."""
        problem = OcpProblem(
            ModelKind.MODEL2, params=reference_params(3.0), grid=TimeGrid(60.0, 200)
        )
        assert probe_refinement(problem).passed

    def test_ramp_is_continuous(self):
        """Should accept a ramp whose jumps halve under refinement."""
        coarse_grid, fine_grid = TimeGrid(10.0, 10), TimeGrid(10.0, 20)
        coarse = ControlTrajectory(coarse_grid, 0.09 * np.arange(11))
        fine = ControlTrajectory(fine_grid, 0.045 * np.arange(21))
        report = probe_continuity(coarse, fine)
        assert report.passed
        assert report.worst_residual == pytest.approx(0.5)

    def test_step_is_discontinuous(self):
        """Should flag a jump that survives refinement."""
        coarse_grid, fine_grid = TimeGrid(10.0, 10), TimeGrid(10.0, 20)
        coarse = ControlTrajectory(
            coarse_grid, np.where(coarse_grid.nodes < 5.0, 0.9, 0.0)
        )
        fine = ControlTrajectory(fine_grid, np.where(fine_grid.nodes < 5.0, 0.9, 0.0))
        report = probe_continuity(coarse, fine)
        assert not report.passed
        assert report.worst_residual == pytest.approx(1.0)

    def test_constant_controls_are_continuous(self):
        """Should pass when neither control jumps."""
        coarse = ControlTrajectory.zeros(TimeGrid(10.0, 10))
        fine = ControlTrajectory.zeros(TimeGrid(10.0, 20))
        assert probe_continuity(coarse, fine).passed
