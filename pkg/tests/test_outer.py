import numpy as np
import pytest

from preventix.errors import SolverDiagnosticError
from preventix.inner import optimal_share
from preventix.oracle import compare_with_solver, grid_search
from preventix.outer import (
    SolverOptions,
    check_tail_mass_convexity,
    effort_upper_bound,
    k_objective,
    minimize_branch,
    solve,
)

from conftest import make_scenario, random_scenario


class TestObjective:
    def test_full_cover_form(self):
        scenario = make_scenario(theta1=2.0)
        mix = scenario.mixture
        e_h_y = scenario.premium.expected_h(mix.severity, 1.0)
        for e in [0.0, 1.0, 8.0]:
            expected = mix.p(e) * e_h_y + mix.cost(e)
            assert k_objective(scenario, e) == pytest.approx(expected, rel=1e-12)

    def test_no_cover_form(self):
        scenario = make_scenario(theta1=10.0)
        for e in [0.0, 5.0]:
            assert optimal_share(scenario, e).alpha == 0.0
            expected = scenario.measure.rho(scenario.mixture, e) + scenario.mixture.cost(e)
            assert k_objective(scenario, e) == pytest.approx(expected, rel=1e-12)

    def test_continuity_at_full_cover_threshold(self, base_scenario):
        result = solve(base_scenario)
        e_g2 = result.thresholds["e_G2"]
        delta = 1e-11 * base_scenario.scale()
        left = k_objective(base_scenario, e_g2 - delta)
        right = k_objective(base_scenario, e_g2 + delta)
        assert abs(left - right) <= 1e-8 * (1.0 + abs(right))


class TestBranchMinimization:
    def test_convex_branch_against_grid(self):
        scenario = make_scenario(theta1=2.0)
        [minimum] = minimize_branch(scenario, 0.0, None)
        es = np.linspace(0.0, 5.0 * scenario.e_beta(), 100_001)
        vals = [k_objective(scenario, float(e)) for e in es]
        idx = int(np.argmin(vals))
        assert abs(minimum.e - float(es[idx])) <= 2 * float(es[1] - es[0])
        assert minimum.value <= vals[idx] + 1e-12

    def test_stationarity_at_interior_minimum(self):
        scenario = make_scenario(theta1=2.0)
        [minimum] = minimize_branch(scenario, 0.0, None)
        h = 1e-5 * scenario.scale()
        derivative = (
            k_objective(scenario, minimum.e + h) - k_objective(scenario, minimum.e - h)
        ) / (2 * h)
        assert abs(derivative) <= 1e-5 * scenario.scale()

    def test_degenerate_interval(self, base_scenario):
        [minimum] = minimize_branch(base_scenario, 2.0, 2.0)
        assert minimum.e == 2.0
        assert minimum.value == pytest.approx(k_objective(base_scenario, 2.0))

    def test_empty_interval_rejected(self, base_scenario):
        with pytest.raises(SolverDiagnosticError):
            minimize_branch(base_scenario, 3.0, 1.0)

    def test_grid_mode_reports_all_local_minima(self, base_scenario):
        minima = minimize_branch(base_scenario, 0.0, 4.0, kind="grid")
        assert len(minima) >= 1
        for m in minima:
            assert 0.0 <= m.e <= 4.0


class TestSolve:
    def test_full_cover_regime(self):
        result = solve(make_scenario(theta1=2.0))
        assert result.case_label == "TVaR-i"
        assert result.alpha_star == 1.0
        assert result.e_star > 0

    def test_no_cover_regime(self):
        result = solve(make_scenario(theta1=10.0))
        assert result.alpha_star == 0.0
        # stabilizes at the no-cover branch minimum, far below the threshold
        assert result.e_star < result.thresholds["e_G1"]

    def test_objective_reevaluates(self, base_scenario):
        result = solve(base_scenario)
        assert result.objective == pytest.approx(
            k_objective(base_scenario, result.e_star), abs=1e-10
        )
        assert result.alpha_star == optimal_share(base_scenario, result.e_star).alpha

    def test_continuity_at_thresholds(self, base_scenario):
        result = solve(base_scenario)
        delta = 1e-10 * base_scenario.scale()
        for value in result.thresholds.values():
            if value <= delta:
                continue
            left = k_objective(base_scenario, value - delta)
            right = k_objective(base_scenario, value + delta)
            assert abs(left - right) <= 1e-7 * (1.0 + abs(right))

    def test_tail_mass_convexity_holds_on_reference_configs(self):
        for theta1 in [2.0, 4.5, 10.0, 18.5]:
            assert check_tail_mass_convexity(make_scenario(theta1=theta1))

    def test_effort_upper_bound_is_a_bound(self, base_scenario):
        bound = effort_upper_bound(base_scenario)
        result = solve(base_scenario)
        assert result.e_star <= bound

    def test_oracle_agreement_on_random_scenarios(self):
        rng = np.random.default_rng(99)
        for _ in range(6):
            scenario = random_scenario(rng)
            result = solve(scenario)
            grid = grid_search(scenario)
            assert compare_with_solver(scenario, result, grid)
            assert grid.value <= result.objective + 1e-6 * (1 + abs(result.objective))

    def test_deterministic_tie_break(self, base_scenario):
        a = solve(base_scenario)
        b = solve(base_scenario)
        assert a.e_star == b.e_star and a.objective == b.objective

    def test_solver_options_respected(self, base_scenario):
        coarse = SolverOptions(interior_grid=64)
        result = solve(base_scenario, coarse)
        reference = solve(base_scenario)
        assert result.objective == pytest.approx(reference.objective, rel=1e-6)
