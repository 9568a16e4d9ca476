import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from preventix.errors import DomainError
from preventix.prevention import (
    HyperbolicLossProbability,
    MixtureLoss,
    PreventionSpec,
    QuadraticCost,
    validate_prevention,
)
from preventix.severity import ParetoSeverity


def make_mixture(gamma1=9.0, gamma2=25.0, kappa=0.1, xhat=2.0, k=2.5):
    return MixtureLoss(
        PreventionSpec(HyperbolicLossProbability(gamma1, gamma2), QuadraticCost(kappa)),
        ParetoSeverity(xhat, k),
    )


class TestFamilies:
    def test_hyperbolic_at_zero(self):
        prob = HyperbolicLossProbability(9.0, 25.0)
        assert prob.p(0.0) == pytest.approx(0.36, rel=1e-15)
        assert prob.p_prime(0.0) < 0

    def test_hyperbolic_witness_point(self):
        prob = HyperbolicLossProbability(9.0, 25.0)
        assert prob.p(155.0) == pytest.approx(0.05, rel=1e-14)

    def test_quadratic_cost_boundary(self):
        cost = QuadraticCost(0.1)
        assert cost.cost(0.0) == 0.0
        assert cost.cost_prime(0.0) == 0.0

    def test_parameter_ordering_enforced(self):
        with pytest.raises(DomainError):
            HyperbolicLossProbability(25.0, 9.0)
        with pytest.raises(DomainError):
            QuadraticCost(0.0)

    def test_negative_effort_rejected(self):
        with pytest.raises(DomainError):
            HyperbolicLossProbability(9.0, 25.0).p(-0.1)
        with pytest.raises(DomainError):
            QuadraticCost(0.1).cost(-1.0)


class TestEBeta:
    def test_base_configuration(self):
        assert make_mixture().e_beta(0.95) == pytest.approx(155.0, rel=1e-12)

    def test_small_probability_configuration(self):
        mix = make_mixture(gamma1=0.1, gamma2=0.9)
        assert mix.e_beta(0.95) == pytest.approx(0.1 / 0.05 - 0.9, rel=1e-12)

    def test_clamps_to_zero_when_regime_holds_from_start(self):
        assert make_mixture().e_beta(0.5) == 0.0

    def test_invalid_level(self):
        with pytest.raises(DomainError):
            make_mixture().e_beta(1.0)


class TestFsd:
    def test_reflexive(self):
        assert make_mixture().fsd_check(3.0, 3.0)

    def test_ordered_efforts_dominate(self):
        assert make_mixture().fsd_check(0.0, 10.0)

    def test_inverted_arguments_fail(self):
        assert not make_mixture().fsd_check(10.0, 0.0)

    @given(
        e1=st.floats(0.0, 50.0),
        delta=st.floats(0.01, 50.0),
    )
    @settings(max_examples=40, deadline=None)
    def test_random_ordered_pairs(self, e1, delta):
        assert make_mixture().fsd_check(e1, e1 + delta, grid_size=60)


class TestShapeValidation:
    def test_builtin_families_pass(self):
        reports = validate_prevention(make_mixture().prevention)
        assert all(r.passed for r in reports)
        assert not any(r.errors for r in reports)

    def test_probability_grid_properties(self):
        prob = HyperbolicLossProbability(9.0, 25.0)
        es = np.linspace(0.0, 250.0, 1000)
        ps = np.array([prob.p(float(e)) for e in es])
        assert np.all(np.diff(ps) < 0)
        assert np.all(np.diff(ps, 2) > 0)

    def test_cost_grid_properties(self):
        cost = QuadraticCost(0.1)
        es = np.linspace(0.0, 250.0, 1000)
        cs = np.array([cost.cost(float(e)) for e in es])
        assert cs[0] == 0.0
        assert (cost.cost(1e-9) - cost.cost(0.0)) / 1e-9 < 1e-8
        assert np.all(np.diff(cs, 2) > 0)

    def test_bad_family_is_reported(self):
        class RisingProbability(HyperbolicLossProbability):
            def p(self, e):
                return min(0.9, 0.1 + 0.001 * e)

            def p_prime(self, e):
                return 0.001

        spec = PreventionSpec(RisingProbability(9.0, 25.0), QuadraticCost(0.1))
        reports = validate_prevention(spec)
        p_report = next(r for r in reports if r.name == "loss_probability_shape")
        assert not p_report.passed
        assert any("non-increasing" in msg for msg in p_report.errors)


class TestMixtureMoments:
    def test_mean_scales_with_probability(self):
        mix = make_mixture()
        assert mix.mean(0.0) == pytest.approx(0.36 * 10.0 / 3.0, rel=1e-14)
        assert mix.second_moment(0.0) == pytest.approx(0.36 * 20.0, rel=1e-14)

    def test_mean_against_monte_carlo(self):
        mix = make_mixture()
        rng = np.random.default_rng(11)
        n = 1_000_000
        e = 5.0
        occur = rng.random(n) < mix.p(e)
        y = 2.0 * (1.0 - rng.random(n)) ** (-1.0 / 2.5)
        x = occur * y
        se = x.std(ddof=1) / math.sqrt(n)
        assert abs(x.mean() - mix.mean(e)) <= 3 * se

    def test_survival_at_zero_is_loss_probability(self):
        mix = make_mixture()
        assert mix.survival(0.0, 3.0) == pytest.approx(mix.p(3.0), rel=1e-14)
