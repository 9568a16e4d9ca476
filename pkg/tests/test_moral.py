import math

import numpy as np
import pytest

from preventix.errors import BracketError
from preventix.moral import (
    admissible_segments,
    constrained_objective,
    incentive_check,
    incentive_share,
    solve_e_bound,
    solve_moral_hazard,
)

from conftest import make_scenario


def closed_form_low_branch_share(scenario, e):
    """Incentive share below the branch switch, written out independently:
    1 - (2 kappa (k-1) / xhat) (1-beta)^(1/k) gamma1^(-1/k) e (gamma2+e)^(1/k+1)."""
    sev = scenario.mixture.severity
    prob = scenario.mixture.prevention.probability
    kappa = scenario.mixture.prevention.cost.kappa
    beta = scenario.measure.beta
    k = sev.k
    return 1.0 - (2.0 * kappa * (k - 1.0) / sev.xhat) * (1.0 - beta) ** (
        1.0 / k
    ) * prob.gamma1 ** (-1.0 / k) * e * (prob.gamma2 + e) ** (1.0 / k + 1.0)


def closed_form_high_branch_share(scenario, e):
    """Incentive share above the branch switch:
    1 - (2 kappa (k-1) / (xhat k gamma1)) (1-beta) e (gamma2+e)^2."""
    sev = scenario.mixture.severity
    prob = scenario.mixture.prevention.probability
    kappa = scenario.mixture.prevention.cost.kappa
    beta = scenario.measure.beta
    k = sev.k
    return 1.0 - (2.0 * kappa * (k - 1.0) / (sev.xhat * k * prob.gamma1)) * (
        1.0 - beta
    ) * e * (prob.gamma2 + e) ** 2


class TestIncentiveShare:
    def test_exact_at_zero(self, base_scenario):
        assert incentive_share(base_scenario, 0.0) == 1.0

    def test_matches_low_branch_closed_form(self, base_scenario):
        for e in [0.1, 0.3, 0.5691, 2.0]:
            assert incentive_share(base_scenario, e) == pytest.approx(
                closed_form_low_branch_share(base_scenario, e), rel=1e-10
            )

    def test_matches_high_branch_closed_form(self, base_scenario):
        e = base_scenario.e_beta() + 1.0
        assert incentive_share(base_scenario, e) == pytest.approx(
            closed_form_high_branch_share(base_scenario, e), rel=1e-10
        )

    def test_near_zero_at_reported_boundary(self, base_scenario):
        assert abs(incentive_share(base_scenario, 0.569135)) <= 5e-4

    def test_finite_difference_path_agrees(self, base_scenario):
        from preventix.distortion import DistortionMeasure

        e = 0.3
        fd_slope = DistortionMeasure.rho_prime(
            base_scenario.measure, base_scenario.mixture, e
        )
        fd_share = 1.0 + base_scenario.mixture.cost_prime(e) / fd_slope
        assert incentive_share(base_scenario, e) == pytest.approx(fd_share, rel=1e-6)


class TestAdmissibleBoundary:
    def test_reference_value(self, base_scenario):
        assert solve_e_bound(base_scenario) == pytest.approx(0.569135, abs=1e-4)

    def test_second_parameterization_root(self):
        scenario = make_scenario(
            xhat=1.0, k=5.0, gamma1=0.1, gamma2=0.9, kappa=1.0, theta1=5.0, theta2=1.0
        )
        e_bound = solve_e_bound(scenario)
        # independent bisection of the closed-form share zero-crossing
        lo, hi = 1e-9, scenario.e_beta()
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if closed_form_low_branch_share(scenario, mid) > 0:
                lo = mid
            else:
                hi = mid
        assert e_bound == pytest.approx(0.5 * (lo + hi), abs=1e-8)
        assert e_bound == pytest.approx(0.1373983, abs=1e-6)
        assert abs(e_bound - 0.569135) > 0.1  # genuinely different root here

    def test_share_vanishes_at_boundary(self, base_scenario):
        e_bound = solve_e_bound(base_scenario)
        assert abs(incentive_share(base_scenario, e_bound)) <= 1e-8

    def test_huge_cost_empties_the_set(self):
        scenario = make_scenario(kappa=1e9)
        assert admissible_segments(scenario) == []

    def test_disconnected_set_is_detected(self):
        scenario = make_scenario(
            xhat=5.0, k=2.5, gamma1=0.5, gamma2=1.0, kappa=0.5,
            theta1=3.0, theta2=0.05,
        )
        from preventix.distortion import TVaRMeasure

        scenario = type(scenario)(scenario.mixture, scenario.premium, TVaRMeasure(0.83))
        segments = admissible_segments(scenario)
        assert len(segments) == 2
        e_b = scenario.e_beta()
        assert segments[0][1] < e_b <= segments[1][0]


class TestConstrainedObjective:
    def test_corner_value_is_exact_closed_form(self, base_scenario):
        expected = 0.36 * (5.5 * 10.0 / 3.0 + 0.1 * 20.0)
        assert constrained_objective(base_scenario, 0.0) == pytest.approx(
            expected, rel=1e-14
        )

    def test_no_insurance_at_boundary(self, base_scenario):
        e_bound = solve_e_bound(base_scenario)
        value = constrained_objective(base_scenario, e_bound)
        rho = base_scenario.measure.rho(base_scenario.mixture, e_bound)
        assert value == pytest.approx(
            rho + base_scenario.mixture.cost(e_bound), rel=1e-8
        )

    def test_dual_path_evaluation(self, base_scenario):
        """Explicit expansion of the constrained objective versus the module."""
        e = 0.3
        share = closed_form_low_branch_share(base_scenario, e)
        sev = base_scenario.mixture.severity
        p = base_scenario.mixture.p(e)
        k, xhat = sev.k, sev.xhat
        beta = base_scenario.measure.beta
        tail_avg = xhat * k / ((k - 1.0) * (1.0 - beta) ** (1.0 / k)) * p ** (1.0 / k)
        explicit = (
            tail_avg * (1.0 - share)
            + (1.0 + 4.5) * xhat * k / (k - 1.0) * share * p
            + 0.1 * xhat**2 * k / (k - 2.0) * share**2 * p
            + base_scenario.mixture.cost(e)
        )
        assert constrained_objective(base_scenario, e) == pytest.approx(
            explicit, rel=1e-8
        )

    def test_outside_admissible_set_rejected(self, base_scenario):
        e_bound = solve_e_bound(base_scenario)
        with pytest.raises(BracketError):
            constrained_objective(base_scenario, 2.0 * e_bound)


class TestHiddenEffortSolve:
    def test_substitution_pattern_in_loading(self, base_scenario):
        efforts, shares = [], []
        for theta1 in np.linspace(0.0, 20.0, 21):
            scenario = make_scenario(theta1=float(theta1))
            result = solve_moral_hazard(scenario)
            efforts.append(result.e_star)
            shares.append(result.alpha_star)
        assert np.all(np.diff(efforts) >= -1e-9)
        assert np.all(np.diff(shares) <= 1e-9)

    def test_huge_cost_takes_corner(self):
        result = solve_moral_hazard(make_scenario(kappa=1e9))
        assert result.corner_taken
        assert result.e_star == 0.0 and result.alpha_star == 1.0
        assert result.diagnostics.get("admissible_empty")

    def test_incentive_compatibility(self, base_scenario):
        result = solve_moral_hazard(base_scenario)
        assert not result.corner_taken
        assert incentive_check(base_scenario, result)

    def test_first_order_condition(self, base_scenario):
        result = solve_moral_hazard(base_scenario)
        slope = base_scenario.measure.rho_prime(base_scenario.mixture, result.e_star)
        if isinstance(slope, tuple):
            slope = slope[1]
        residual = (1.0 - result.alpha_star) * slope + base_scenario.mixture.cost_prime(
            result.e_star
        )
        assert abs(residual) <= 1e-7 * (1.0 + abs(slope))

    def test_share_monotone_on_each_branch(self, base_scenario):
        e_b = base_scenario.e_beta()
        early = np.linspace(1e-6, min(e_b * 0.999, 5.0), 500)
        vals = [incentive_share(base_scenario, float(e)) for e in early]
        assert np.all(np.diff(vals) <= 1e-10)
        late = np.linspace(e_b * 1.001, e_b * 3.0, 200)
        vals = [incentive_share(base_scenario, float(e)) for e in late]
        assert np.all(np.diff(vals) <= 1e-10)

    def test_objective_continuity_inside_admissible_set(self, base_scenario):
        e_bound = solve_e_bound(base_scenario)
        es = np.linspace(1e-6, e_bound, 400)
        vals = np.array([constrained_objective(base_scenario, float(e)) for e in es])
        steps = np.abs(np.diff(vals))
        assert np.max(steps) <= 20.0 * np.median(steps) + 1e-9

    def test_grid_oracle_agreement(self, base_scenario):
        from preventix.oracle import compare_moral_with_solver, moral_hazard_grid

        result = solve_moral_hazard(base_scenario)
        grid = moral_hazard_grid(base_scenario, result.e_bound)
        assert compare_moral_with_solver(base_scenario, result, grid)
