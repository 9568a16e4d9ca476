import math

import numpy as np
import pytest

from preventix.distortion import (
    DistortionMeasure,
    GenericConcaveDistortion,
    PowerDistortion,
    TVaRMeasure,
)
from preventix.errors import DomainError, InfiniteRiskError
from preventix.prevention import (
    HyperbolicLossProbability,
    MixtureLoss,
    PreventionSpec,
    QuadraticCost,
)
from preventix.severity import ParetoSeverity

from conftest import make_scenario


def base_mixture(**kw):
    return make_scenario(**kw).mixture


class TestVarOfMixture:
    def test_zero_above_switch_effort(self):
        measure = TVaRMeasure(0.95)
        mix = base_mixture()
        e_b = mix.e_beta(0.95)
        assert measure.var(mix, e_b) == 0.0
        assert measure.var(mix, e_b + 5.0) == 0.0

    def test_base_value_against_empirical_quantile(self):
        measure = TVaRMeasure(0.95)
        mix = base_mixture()
        value = measure.var(mix, 0.0)
        assert value == pytest.approx(4.4051733, abs=1e-6)
        rng = np.random.default_rng(5)
        n = 2_000_000
        x = (rng.random(n) < 0.36) * (2.0 * (1.0 - rng.random(n)) ** (-0.4))
        empirical = np.quantile(x, 0.95)
        assert value == pytest.approx(empirical, rel=5e-3)

    def test_branch_boundary(self):
        measure = TVaRMeasure(0.64)
        mix = base_mixture()
        assert measure.var(mix, 0.0) == 0.0


class TestTailAverage:
    def test_base_value(self):
        measure = TVaRMeasure(0.95)
        value = measure.rho(base_mixture(), 0.0)
        assert value == pytest.approx((10.0 / 3.0) * 7.2**0.4, rel=1e-12)
        assert value == pytest.approx(7.3419554, abs=1e-6)

    def test_continuity_at_switch_effort(self):
        measure = TVaRMeasure(0.95)
        mix = base_mixture()
        e_b = mix.e_beta(0.95)
        left = measure.rho(mix, e_b * (1 - 1e-10))
        right = measure.rho(mix, e_b * (1 + 1e-10))
        assert left == pytest.approx(right, rel=1e-8)
        assert right == pytest.approx(10.0 / 3.0, rel=1e-6)

    def test_low_confidence_limit_is_mean(self):
        measure = TVaRMeasure(1e-9)
        mix = base_mixture()
        for e in [0.0, 4.0]:
            assert measure.rho(mix, e) == pytest.approx(mix.mean(e), rel=1e-6)

    def test_generic_severity_path(self):
        from preventix.severity import QuantileSeverity

        mix = base_mixture()
        generic = MixtureLoss(
            mix.prevention, QuantileSeverity(lambda u: 2.0 * (1 - u) ** (-0.4))
        )
        measure = TVaRMeasure(0.95)
        assert measure.rho(generic, 1.0) == pytest.approx(
            measure.rho(mix, 1.0), rel=1e-7
        )


class TestPowerDistortion:
    def test_closed_form_value(self):
        mix = base_mixture(xhat=1.0, k=4.0, gamma1=0.13, gamma2=10.0)
        measure = PowerDistortion(0.5)
        assert mix.p(0.0) == pytest.approx(0.013, rel=1e-14)
        assert measure.rho(mix, 0.0) == pytest.approx(2.0 * math.sqrt(0.013), rel=1e-12)
        assert measure.rho(mix, 0.0) == pytest.approx(0.2280351, abs=1e-6)

    def test_divergence_boundary(self):
        mix = base_mixture(xhat=1.0, k=4.0)
        with pytest.raises(InfiniteRiskError):
            PowerDistortion(0.25).rho(mix, 0.0)

    def test_identity_limit_recovers_mean(self):
        mix = base_mixture(xhat=1.0, k=4.0)
        measure = PowerDistortion(1.0 - 1e-9)
        assert measure.rho(mix, 2.0) == pytest.approx(mix.mean(2.0), rel=1e-6)

    def test_exponent_domain(self):
        with pytest.raises(DomainError):
            PowerDistortion(1.5)


class TestGenericConcave:
    def test_identity_gives_expectation(self):
        mix = base_mixture()
        measure = GenericConcaveDistortion(lambda u: u, g_prime=lambda u: 1.0)
        for e in [0.0, 3.0, 50.0]:
            assert measure.rho(mix, e) == pytest.approx(mix.mean(e), rel=1e-9)

    def test_matches_power_closed_form(self):
        mix = base_mixture(xhat=1.0, k=4.0, gamma1=0.13, gamma2=10.0)
        generic = GenericConcaveDistortion(
            lambda u: u**0.5, g_prime=lambda u: 0.5 * u**-0.5
        )
        closed = PowerDistortion(0.5)
        assert generic.rho(mix, 0.0) == pytest.approx(closed.rho(mix, 0.0), rel=1e-7)

    def test_partition_sum_fallback(self):
        mix = base_mixture(xhat=1.0, k=4.0, gamma1=0.13, gamma2=10.0)
        generic = GenericConcaveDistortion(lambda u: u**0.5)
        closed = PowerDistortion(0.5)
        assert generic.rho(mix, 0.0) == pytest.approx(closed.rho(mix, 0.0), rel=2e-3)

    def test_reproduces_tail_average(self):
        mix = base_mixture()
        rng = np.random.default_rng(17)
        for _ in range(20):
            beta = float(rng.uniform(0.6, 0.97))
            e = float(rng.uniform(0.0, 20.0))
            tvar = TVaRMeasure(beta)
            generic = GenericConcaveDistortion(
                lambda u, b=beta: min(1.0, u / (1.0 - b))
            )
            assert generic.rho(mix, e) == pytest.approx(tvar.rho(mix, e), rel=2e-3)

    def test_validates_distortion_shape(self):
        with pytest.raises(DomainError):
            GenericConcaveDistortion(lambda u: u**2)  # convex
        with pytest.raises(DomainError):
            GenericConcaveDistortion(lambda u: 0.5 * u)  # g(1) != 1


class TestEffortDerivative:
    def test_sign_above_switch(self):
        measure = TVaRMeasure(0.95)
        mix = base_mixture()
        e = mix.e_beta(0.95) + 2.0
        analytic = measure.rho_prime(mix, e)
        assert analytic < 0
        assert analytic == pytest.approx(
            mix.severity.mean() * mix.p_prime(e) / 0.05, rel=1e-12
        )

    def test_against_finite_difference(self):
        measure = TVaRMeasure(0.95)
        mix = base_mixture()
        for e in [0.5, 3.0, 40.0]:
            analytic = measure.rho_prime(mix, e)
            fd = DistortionMeasure.rho_prime(measure, mix, e)
            assert analytic == pytest.approx(fd, rel=1e-6)

    def test_identity_distortion_derivative(self):
        mix = base_mixture()
        measure = GenericConcaveDistortion(lambda u: u, g_prime=lambda u: 1.0)
        e = 1.5
        expected = mix.p_prime(e) * mix.severity.mean()
        assert measure.rho_prime(mix, e) == pytest.approx(expected, rel=1e-6)

    def test_one_sided_pair_at_switch(self):
        measure = TVaRMeasure(0.95)
        mix = base_mixture()
        e_b = mix.e_beta(0.95)
        pair = measure.rho_prime(mix, e_b)
        assert isinstance(pair, tuple)
        left, right = pair
        assert right < left < 0  # severity floor makes the jump downward


class TestMeasureProperties:
    @pytest.mark.parametrize(
        "measure",
        [TVaRMeasure(0.95), PowerDistortion(0.5)],
        ids=["tvar", "power"],
    )
    def test_monotone_in_effort(self, measure):
        mix = base_mixture(xhat=1.0, k=4.0)
        es = np.linspace(0.0, 120.0, 200)
        vals = [measure.rho(mix, float(e)) for e in es]
        assert np.all(np.diff(vals) <= 1e-12)

    @pytest.mark.parametrize(
        "measure",
        [TVaRMeasure(0.9), PowerDistortion(0.6)],
        ids=["tvar", "power"],
    )
    def test_dominates_expectation(self, measure):
        mix = base_mixture(xhat=1.0, k=4.0)
        for e in np.linspace(0.0, 60.0, 40):
            assert measure.rho(mix, float(e)) >= mix.mean(float(e)) - 1e-12

    def test_positive_homogeneity(self):
        for measure in (TVaRMeasure(0.95), PowerDistortion(0.5)):
            for lam in (0.5, 2.0):
                mix = base_mixture(xhat=1.0, k=4.0)
                scaled = MixtureLoss(mix.prevention, mix.severity.scaled(lam))
                for e in (0.0, 2.5):
                    assert measure.rho(scaled, e) == pytest.approx(
                        lam * measure.rho(mix, e), rel=1e-8
                    )

    def test_convexity_in_effort_for_concave_distortion(self):
        mix = base_mixture(xhat=1.0, k=4.0, gamma1=0.13, gamma2=10.0)
        measure = PowerDistortion(0.5)
        es = np.linspace(0.0, 50.0, 400)
        vals = np.array([measure.rho(mix, float(e)) for e in es])
        assert np.all(np.diff(vals, 2) >= -1e-8)
