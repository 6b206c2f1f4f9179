"""Tests for the domain value types."""

# Standard library imports
import math

# Third-party imports
import pytest

# First-party imports
from pontrol.models import (
    AdjointState,
    ControlBounds,
    EpidemicParams,
    IntegrationError,
    InvalidInputError,
    ModelError,
    ModelKind,
    NormalizedState,
    ObjectiveWeights,
    RawPopulation,
    StateDerivative,
    validate_initial_state,
)


class TestModelKind:
    """Test model kind parsing and properties."""

    def test_parses_common_spellings(self):
        """Should accept integers, digit strings and model names."""
        assert ModelKind.parse(1) is ModelKind.MODEL1
        assert ModelKind.parse("2") is ModelKind.MODEL2
        assert ModelKind.parse("model1") is ModelKind.MODEL1
        assert ModelKind.parse("Model-2") is ModelKind.MODEL2
        assert ModelKind.parse(ModelKind.MODEL2) is ModelKind.MODEL2

    def test_rejects_unknown_kind(self):
        """Should raise InvalidInputError for a kind that does not exist."""
        with pytest.raises(InvalidInputError, match="Unknown model kind"):
            ModelKind.parse(3)
        with pytest.raises(InvalidInputError):
            ModelKind.parse("sir")

    def test_adjoint_dimensions(self):
        """Should carry four costates for Model 1 and five for Model 2."""
        assert ModelKind.MODEL1.adjoint_dim == 4
        assert ModelKind.MODEL2.adjoint_dim == 5

    def test_label(self):
        """Should render a readable label."""
        assert ModelKind.MODEL1.label == "Model-1"


class TestEpidemicParams:
    """Test parameter validation."""

    def test_defaults_are_reference_rates(self):
        """Should default to the reference rate constants."""
        params = EpidemicParams(beta1=0.258176, beta2=0.0258176)
        assert params.gamma == 0.18
        assert params.sigma1 == 0.8
        assert params.sigma2 == 0.2
        assert params.rho1 == pytest.approx(1.0 / 14.0)
        assert params.rho2 == pytest.approx(1.0 / 21.0)
        assert params.q == 0.15

    def test_rejects_negative_rate(self):
        """Should reject negative rates."""
        with pytest.raises(InvalidInputError, match="gamma must be non-negative"):
            EpidemicParams(beta1=0.3, beta2=0.03, gamma=-0.1)

    def test_rejects_non_finite_rate(self):
        """Should reject NaN and infinite rates."""
        with pytest.raises(InvalidInputError, match="must be finite"):
            EpidemicParams(beta1=math.nan, beta2=0.0)
        with pytest.raises(InvalidInputError, match="must be finite"):
            EpidemicParams(beta1=0.3, beta2=0.03, rho1=math.inf)

    def test_rejects_sigmas_not_summing_to_one(self):
        """Should require sigma1 + sigma2 = 1."""
        with pytest.raises(InvalidInputError, match="sigma1 \\+ sigma2"):
            EpidemicParams(beta1=0.3, beta2=0.03, sigma1=0.7, sigma2=0.2)

    def test_rejects_q_above_one(self):
        """Should require the death probability to be at most 1."""
        with pytest.raises(InvalidInputError, match="q must lie"):
            EpidemicParams(beta1=0.3, beta2=0.03, q=1.5)

    def test_requires_beta1_above_beta2(self):
        """Should reject beta1 <= beta2 unless both vanish."""
        with pytest.raises(InvalidInputError, match="beta1 must exceed beta2"):
            EpidemicParams(beta1=0.1, beta2=0.1)
        params = EpidemicParams(beta1=0.0, beta2=0.0)
        assert params.beta_ratio == 0.0

    def test_with_betas_keeps_other_rates(self):
        """Should copy every rate except the betas."""
        base = EpidemicParams(beta1=0.3, beta2=0.03, gamma=0.2)
        updated = base.with_betas(0.5, 0.05)
        assert updated.beta1 == 0.5
        assert updated.beta2 == 0.05
        assert updated.gamma == 0.2
        assert updated.beta_ratio == pytest.approx(0.1)


class TestRawPopulation:
    """Test raw population validation."""

    def test_accepts_consistent_counts(self):
        """Should accept counts summing to N."""
        raw = RawPopulation(S=9_998_500, E=500, I=800, J=200, R=0, N=10_000_000)
        assert raw.N == 10_000_000

    def test_accepts_zero_infected(self):
        """Should accept the infection-free population."""
        raw = RawPopulation(S=100, E=0, I=0, J=0, R=0, N=100)
        assert raw.E == 0

    def test_rejects_non_positive_population(self):
        """Should require N > 0."""
        with pytest.raises(InvalidInputError, match="N must be positive"):
            RawPopulation(S=0, E=0, I=0, J=0, R=0, N=0)

    def test_rejects_negative_count(self):
        """Should reject negative compartment counts."""
        with pytest.raises(InvalidInputError, match="E must be non-negative"):
            RawPopulation(S=101, E=-1, I=0, J=0, R=0, N=100)

    def test_rejects_inconsistent_sum(self):
        """Should reject compartments that do not add up to N."""
        with pytest.raises(InvalidInputError, match="Compartments sum"):
            RawPopulation(S=90, E=0, I=0, J=0, R=0, N=100)


class TestNormalizedState:
    """Test normalized state helpers and initial-state validation."""

    def test_aggregates(self):
        """Should compute active and infected fractions."""
        state = NormalizedState(s=0.9, e=0.02, i=0.03, j=0.01, r=0.04, n=1.0)
        assert state.active == pytest.approx(0.06)
        assert state.infected == pytest.approx(0.04)
        assert state.conservation_residual() == pytest.approx(0.0, abs=1e-15)

    def test_from_sequence_requires_six_values(self):
        """Should reject sequences of the wrong length."""
        with pytest.raises(InvalidInputError, match="Expected 6"):
            NormalizedState.from_sequence([1.0, 0.0])

    def test_validate_accepts_reference_state(self):
        """Should accept a state summing to one with n = 1."""
        validate_initial_state(
            NormalizedState(s=0.99985, e=5e-5, i=8e-5, j=2e-5, r=0.0, n=1.0)
        )

    def test_validate_rejects_bad_sum(self):
        """Should reject fractions that do not sum to one."""
        with pytest.raises(InvalidInputError, match="sum to"):
            validate_initial_state(
                NormalizedState(s=0.5, e=0.0, i=0.0, j=0.0, r=0.0, n=1.0)
            )

    def test_validate_rejects_negative_fraction(self):
        """Should reject negative fractions."""
        with pytest.raises(InvalidInputError, match="non-negative"):
            validate_initial_state(
                NormalizedState(s=1.1, e=-0.1, i=0.0, j=0.0, r=0.0, n=1.0)
            )

    def test_validate_rejects_n_other_than_one(self):
        """Should require n = 1 at t = 0."""
        with pytest.raises(InvalidInputError, match="n must equal 1"):
            validate_initial_state(
                NormalizedState(s=0.5, e=0.0, i=0.0, j=0.0, r=0.0, n=0.5)
            )


class TestControlBoundsAndWeights:
    """Test control bounds and objective weights."""

    def test_clamp(self):
        """Should project values onto [0, u_max]."""
        bounds = ControlBounds(0.9)
        assert bounds.clamp(-0.2) == 0.0
        assert bounds.clamp(0.4) == 0.4
        assert bounds.clamp(1.7) == 0.9
        assert bounds.w_min == pytest.approx(0.1)

    @pytest.mark.parametrize("u_max", [0.0, 1.0, 1.2, -0.1])
    def test_rejects_u_max_outside_open_interval(self, u_max):
        """Should require 0 < u_max < 1."""
        with pytest.raises(InvalidInputError, match="u_max must lie"):
            ControlBounds(u_max)

    def test_weights_validation(self):
        """Should require alpha3 > 0 and non-negative alpha1, alpha2."""
        with pytest.raises(InvalidInputError, match="alpha3 must be positive"):
            ObjectiveWeights(alpha3=0.0)
        with pytest.raises(InvalidInputError, match="non-negative"):
            ObjectiveWeights(alpha1=-1.0)
        ObjectiveWeights(alpha1=0.0, alpha2=0.0)

    def test_terminal_cost(self):
        """Should weight e + i + j at the final time by alpha1."""
        state = NormalizedState(s=0.9, e=0.01, i=0.02, j=0.03, r=0.04, n=1.0)
        assert ObjectiveWeights(alpha1=2.0).terminal_cost(state) == pytest.approx(0.12)


class TestAdjointState:
    """Test costate vectors."""

    def test_terminal_data_model1(self):
        """Should be (0, -alpha1, -alpha1, -alpha1) for Model 1."""
        terminal = AdjointState.terminal(ModelKind.MODEL1, ObjectiveWeights(alpha1=2.0))
        assert terminal.values == (0.0, -2.0, -2.0, -2.0)
        assert terminal.difference == 2.0

    def test_terminal_data_model2(self):
        """Should append a zero costate for n in Model 2."""
        terminal = AdjointState.terminal(ModelKind.MODEL2, ObjectiveWeights())
        assert terminal.values == (0.0, -1.0, -1.0, -1.0, 0.0)

    def test_rejects_wrong_dimension(self):
        """Should reject a costate vector of the wrong length."""
        with pytest.raises(InvalidInputError, match="needs 5 costates"):
            AdjointState(ModelKind.MODEL2, (0.0, 0.0, 0.0, 0.0))


class TestErrors:
    """Test the error hierarchy."""

    def test_errors_derive_from_model_error(self):
        """Should let callers catch every domain error at once."""
        error = IntegrationError("blew up", node=7)
        assert isinstance(error, ModelError)
        assert str(error) == "blew up"
        assert error.node == 7

    def test_derivative_balance(self):
        """Should report the mismatch between compartment and n derivatives."""
        derivative = StateDerivative(s=-1.0, e=0.5, i=0.2, j=0.1, r=0.1, n=-0.2)
        assert derivative.balance_residual() == pytest.approx(0.1)
