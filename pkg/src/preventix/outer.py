"""Global minimization of the effort objective.

The objective K(e) = E[h(a* X_e)] - a* rho(X_e) + rho(X_e) + c(e), with a*
the per-effort optimal share, is piecewise: convex on the no-cover and
full-cover regimes (given the tail-mass convexity checks below) but of
unknown shape where the share is interior. The solver decomposes the
half-line by case, minimizes each branch with the method its shape
permits, and compares the local minima; interior-minimum uniqueness is
verified by a global scan rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .distortion import TVaRMeasure
from .errors import SolverDiagnosticError, ThresholdAbsentError
from .inner import (
    Branch,
    Scenario,
    classify_case,
    g1,
    g2,
    optimal_share,
    solve_e_g1,
    solve_e_g2,
)
from .rootfind import central_derivative, golden_min, minimize_convex


@dataclass(frozen=True)
class SolverOptions:
    """Tunable tolerances and grid sizes; the defaults are the contract."""

    e_max_factor: float = 100.0      # cap for concave-measure threshold search
    interior_grid: int = 512         # scan resolution on the interior branch
    mh_grid: int = 1024              # scan resolution for the hidden-effort solver
    e_tol_factor: float = 1e-9       # branch-minimum tolerance, times scale
    root_tol_factor: float = 1e-10   # threshold-root tolerance, times scale
    alpha_tol: float = 1e-12
    tail_start_factor: float = 10.0  # first right endpoint for unbounded branches
    tail_cap_doublings: int = 20
    tie_tol: float = 1e-10           # branch minima closer than this tie to smaller e
    debug_cross_check: bool = False


DEFAULT_OPTIONS = SolverOptions()


@dataclass
class BranchMinimum:
    lo: float
    hi: float | None
    e: float
    value: float

    def as_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "e": self.e, "value": self.value}


@dataclass
class SolveResult:
    e_star: float
    alpha_star: float
    objective: float
    case_label: str
    thresholds: dict[str, float]
    branch_minima: list[BranchMinimum] = field(default_factory=list)
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "e_star": self.e_star,
            "alpha_star": self.alpha_star,
            "objective": self.objective,
            "case_label": self.case_label,
            "thresholds": dict(self.thresholds),
            "branch_minima": [b.as_dict() for b in self.branch_minima],
            "diagnostics": dict(self.diagnostics),
        }


def k_objective(scenario: Scenario, e: float) -> float:
    """Objective at effort e under the per-effort optimal share."""
    decision = optimal_share(scenario, e)
    mixture = scenario.mixture
    rho = scenario.measure.rho(mixture, e)
    prem = scenario.premium.premium(mixture, e, decision.alpha)
    return prem - decision.alpha * rho + rho + mixture.cost(e)


def check_tail_mass_convexity(scenario: Scenario, n: int = 400) -> bool:
    """Convexity of p(e) * tail_integral over the high-frequency regime.

    This is what makes the no-cover branch of the tail-average objective
    convex; a violation downgrades that branch to grid minimization.
    """
    measure = scenario.measure
    if not isinstance(measure, TVaRMeasure):
        return True
    e_b = scenario.e_beta()
    if e_b <= 0.0:
        return True
    es = np.linspace(0.0, e_b, n)
    vals = []
    for e in es:
        p = scenario.mixture.p(float(e))
        level = max((measure.beta + p - 1.0) / p, 0.0)
        vals.append(p * scenario.mixture.severity.tail_integral(level, 1.0))
    second = np.diff(np.array(vals), 2)
    tol = 1e-8 * max(1.0, float(np.max(np.abs(vals))))
    return bool(np.all(second >= -tol))


def check_risk_convexity_in_effort(scenario: Scenario, n: int = 400) -> bool:
    """Convexity of rho(X_e) in effort on [0, 5 * scale] for concave measures."""
    hi = 5.0 * scenario.probability_scale
    es = np.linspace(0.0, hi, n)
    vals = np.array([scenario.measure.rho(scenario.mixture, float(e)) for e in es])
    second = np.diff(vals, 2)
    tol = 1e-8 * max(1.0, float(np.max(np.abs(vals))))
    return bool(np.all(second >= -tol))


def effort_upper_bound(scenario: Scenario) -> float:
    """Rigorous a-priori cap on the optimal effort.

    Every non-cost term of K is non-negative, so K(e) >= c(e); once the cost
    alone exceeds K(0), the effort cannot be optimal.
    """
    target = k_objective(scenario, 0.0)
    hi = max(1.0, scenario.probability_scale)
    for _ in range(80):
        if scenario.mixture.cost(hi) >= target:
            return hi
        hi *= 2.0
    raise SolverDiagnosticError("cost never reaches the zero-effort objective")


def _right_endpoint(scenario: Scenario, lo: float, options: SolverOptions) -> float:
    """Endpoint beyond which K is increasing, found by bracket doubling.

    The cost term is coercive, so the marginal cost eventually dominates the
    (bounded) marginal risk reduction; the doubling is capped all the same.
    """
    scale = scenario.scale()
    hi = max(options.tail_start_factor * scale, 2.0 * lo + scale)
    step = max(1e-6 * scale, 1e-9)
    for _ in range(options.tail_cap_doublings):
        if central_derivative(lambda x: k_objective(scenario, x), hi, step) > 0.0:
            return hi
        hi *= 2.0
    raise SolverDiagnosticError(
        f"objective still decreasing at e={hi}; cost term is not coercive enough"
    )


def _threshold_or_none(
    solver_fn, residual_fn, scenario: Scenario, e_max: float, xtol: float
) -> float | None:
    """Threshold effort, or None when the crossing lies beyond the horizon."""
    try:
        return solver_fn(scenario, e_max=e_max, xtol=xtol)
    except ThresholdAbsentError:
        if residual_fn(e_max) < 0.0:
            return None
        raise


def minimize_branch(
    scenario: Scenario,
    lo: float,
    hi: float | None,
    kind: str = "convex",
    options: SolverOptions = DEFAULT_OPTIONS,
) -> list[BranchMinimum]:
    """Local minima of K on one branch interval.

    kind "convex" trusts convexity: derivative-sign bisection plus a
    golden-section polish. kind "grid" scans, refines every discrete local
    minimum, and returns them all (uniqueness is observed, not assumed).
    """
    if hi is not None and hi < lo:
        raise SolverDiagnosticError(f"empty branch interval [{lo}, {hi}]")
    bounded_hi = _right_endpoint(scenario, lo, options) if hi is None else hi
    xtol = options.e_tol_factor * scenario.scale()
    f = lambda e: k_objective(scenario, e)
    if bounded_hi - lo <= xtol:
        e = 0.5 * (lo + bounded_hi)
        return [BranchMinimum(lo, hi, e, f(e))]
    if kind == "convex":
        e, val = minimize_convex(f, lo, bounded_hi, xtol)
        return [BranchMinimum(lo, hi, e, val)]
    es = np.linspace(lo, bounded_hi, options.interior_grid)
    ks = np.array([f(float(e)) for e in es])
    minima: list[BranchMinimum] = []
    n = len(es)
    for i in range(n):
        left_ok = i == 0 or ks[i] <= ks[i - 1]
        right_ok = i == n - 1 or ks[i] <= ks[i + 1]
        if left_ok and right_ok:
            a = es[max(i - 1, 0)]
            b = es[min(i + 1, n - 1)]
            e_ref, v_ref = golden_min(f, float(a), float(b), xtol)
            if not any(abs(e_ref - m.e) <= 4.0 * xtol for m in minima):
                minima.append(BranchMinimum(lo, hi, e_ref, v_ref))
    minima.sort(key=lambda m: m.e)
    return minima


def _case_intervals(
    scenario: Scenario,
    case: str,
    options: SolverOptions,
) -> tuple[list[tuple[float, float | None, str]], dict[str, float], dict[str, Any]]:
    """Interval decomposition for the classified case, plus thresholds."""
    thresholds: dict[str, float] = {}
    diagnostics: dict[str, Any] = {}
    scale = scenario.scale()
    root_tol = options.root_tol_factor * scale
    e_max = options.e_max_factor * scenario.probability_scale

    convex_null = "convex"
    if case in ("TVaR-iv", "TVaR-v", "TVaR-vi"):
        ok = check_tail_mass_convexity(scenario)
        diagnostics["tail_mass_convexity"] = ok
        if not ok:
            convex_null = "grid"
    if case == "DRM-iii":
        ok = check_risk_convexity_in_effort(scenario)
        diagnostics["risk_convexity_in_effort"] = ok
        if not ok:
            convex_null = "grid"

    if case.startswith("TVaR"):
        e_b = scenario.e_beta()
        thresholds["e_beta"] = e_b
        if case in ("TVaR-ii", "TVaR-iv"):
            thresholds["e_G2"] = solve_e_g2(scenario, xtol=root_tol)
        if case in ("TVaR-iv", "TVaR-v"):
            thresholds["e_G1"] = solve_e_g1(scenario, xtol=root_tol)
    elif case in ("DRM-ii", "DRM-iii"):
        # the share thresholds of a concave measure can sit far beyond any
        # effort that could ever be optimal; searches stop at the coercivity
        # horizon and the unreachable regime is dropped from the decomposition
        horizon = max(e_max, effort_upper_bound(scenario))
        diagnostics["effort_horizon"] = horizon
        if case == "DRM-iii":
            e_g1 = _threshold_or_none(
                solve_e_g1,
                lambda e: g1(scenario, e) - scenario.premium.h_prime_at_zero(),
                scenario,
                horizon,
                root_tol,
            )
            if e_g1 is None:
                diagnostics["e_G1_beyond_horizon"] = True
            else:
                thresholds["e_G1"] = e_g1
        e_g2 = _threshold_or_none(
            solve_e_g2, lambda e: g2(scenario, e) - 1.0, scenario, horizon, root_tol
        )
        if e_g2 is None:
            diagnostics["e_G2_beyond_horizon"] = True
        else:
            thresholds["e_G2"] = e_g2

    if case in ("TVaR-i", "DRM-i"):
        intervals = [(0.0, None, "convex")]
    elif case == "TVaR-ii":
        intervals = [(0.0, thresholds["e_G2"], "grid"), (thresholds["e_G2"], None, "convex")]
    elif case == "DRM-ii":
        if "e_G2" in thresholds:
            intervals = [
                (0.0, thresholds["e_G2"], "grid"),
                (thresholds["e_G2"], None, "convex"),
            ]
        else:
            intervals = [(0.0, diagnostics["effort_horizon"], "grid")]
    elif case == "TVaR-iii":
        e_b = thresholds["e_beta"]
        intervals = [(0.0, e_b, "grid"), (e_b, None, "convex")]
    elif case == "TVaR-iv":
        e_g1, e_g2 = thresholds["e_G1"], thresholds["e_G2"]
        intervals = [
            (0.0, e_g1, convex_null),
            (e_g1, e_g2, "grid"),
            (e_g2, None, "convex"),
        ]
    elif case == "DRM-iii":
        horizon = diagnostics["effort_horizon"]
        if "e_G1" not in thresholds:
            intervals = [(0.0, horizon, convex_null)]
        elif "e_G2" not in thresholds:
            intervals = [
                (0.0, thresholds["e_G1"], convex_null),
                (thresholds["e_G1"], horizon, "grid"),
            ]
        else:
            intervals = [
                (0.0, thresholds["e_G1"], convex_null),
                (thresholds["e_G1"], thresholds["e_G2"], "grid"),
                (thresholds["e_G2"], None, "convex"),
            ]
    elif case == "TVaR-v":
        e_g1, e_b = thresholds["e_G1"], thresholds["e_beta"]
        intervals = [
            (0.0, e_g1, convex_null),
            (e_g1, e_b, "grid"),
            (e_b, None, "convex"),
        ]
    elif case == "TVaR-vi":
        e_b = thresholds["e_beta"]
        intervals = [(0.0, e_b, convex_null), (e_b, None, "convex")]
    else:  # pragma: no cover - classify_case is exhaustive
        raise SolverDiagnosticError(f"unknown case label {case}")

    intervals = [
        (lo, hi, kind)
        for lo, hi, kind in intervals
        if hi is None or hi - lo > 1e-15 * max(1.0, scale)
    ]
    return intervals, thresholds, diagnostics


def solve(scenario: Scenario, options: SolverOptions = DEFAULT_OPTIONS) -> SolveResult:
    """Classify, decompose, minimize per branch, and compare local minima.

    Ties within tie_tol break toward the smaller effort, so output is
    deterministic when two regimes are equally good.
    """
    case = classify_case(scenario)
    intervals, thresholds, diagnostics = _case_intervals(scenario, case, options)
    minima: list[BranchMinimum] = []
    for lo, hi, kind in intervals:
        minima.extend(minimize_branch(scenario, lo, hi, kind, options))
    if not minima:
        raise SolverDiagnosticError("no branch produced a candidate minimum")

    diagnostics["interior_local_minima"] = sum(
        1
        for m in minima
        if any(
            kind == "grid" and lo <= m.e <= (hi if hi is not None else math.inf)
            for lo, hi, kind in intervals
        )
    )

    best = minima[0]
    for m in minima[1:]:
        if m.value < best.value - options.tie_tol:
            best = m
        elif abs(m.value - best.value) <= options.tie_tol and m.e < best.e:
            best = m

    decision = optimal_share(scenario, best.e)
    objective = k_objective(scenario, best.e)
    return SolveResult(
        e_star=best.e,
        alpha_star=decision.alpha,
        objective=objective,
        case_label=case,
        thresholds=thresholds,
        branch_minima=minima,
        diagnostics=diagnostics,
    )
