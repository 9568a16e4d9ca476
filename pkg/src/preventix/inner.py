"""Optimal coinsurance share for a fixed prevention effort.

For each effort the share problem is convex, so the minimizer is decided by
two ratio statistics of the risk measure:

    g1(e) = rho(X_e) / E[X_e]            against the marginal price h'(0)
    g2(e) = rho(X_e) / E[X_e h'(X_e)]    against 1

Full cover when g2 >= 1, no cover when g1 <= h'(0), and otherwise the
unique interior share solving E[X_e h'(alpha X_e)] = rho(X_e). Both
statistics are non-decreasing in effort, which also yields the regime
switch efforts and the case classification that the outer solver uses.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .distortion import DistortionMeasure, TVaRMeasure
from .errors import (
    BracketError,
    DegenerateEffortError,
    ThresholdAbsentError,
    UnsupportedMeasureError,
)
from .premium import PremiumPrinciple, QuadraticPremium
from .prevention import MixtureLoss
from .rootfind import bisect_root

_P_FLOOR = 1e-300


@dataclass(frozen=True)
class Scenario:
    """The full decision problem: loss mixture, premium principle, risk measure."""

    mixture: MixtureLoss
    premium: PremiumPrinciple
    measure: DistortionMeasure

    @property
    def probability_scale(self) -> float:
        return self.mixture.prevention.probability.scale

    def e_beta(self) -> float | None:
        """Branch-switch effort of the tail-average measure, if applicable."""
        if isinstance(self.measure, TVaRMeasure):
            return self.mixture.e_beta(self.measure.beta)
        return None

    def scale(self) -> float:
        """Characteristic effort scale for tolerances and search caps."""
        e_b = self.e_beta() or 0.0
        return max(1.0, e_b, self.probability_scale)


class Branch(enum.Enum):
    FULL = "full"
    NULL = "null"
    INTERIOR = "interior"


@dataclass(frozen=True)
class ShareDecision:
    alpha: float
    branch: Branch
    g1: float
    g2: float


def g1(scenario: Scenario, e: float) -> float:
    """rho(X_e) / E[X_e]."""
    p = scenario.mixture.p(e)
    if p < _P_FLOOR:
        raise DegenerateEffortError("loss probability is numerically zero")
    return scenario.measure.rho(scenario.mixture, e) / scenario.mixture.mean(e)


def g2(scenario: Scenario, e: float) -> float:
    """rho(X_e) / E[X_e h'(X_e)]."""
    p = scenario.mixture.p(e)
    if p < _P_FLOOR:
        raise DegenerateEffortError("loss probability is numerically zero")
    weighted = scenario.premium.weighted_loss(scenario.mixture, e, 1.0)
    return scenario.measure.rho(scenario.mixture, e) / weighted


def solve_alpha_h(scenario: Scenario, e: float, alpha_tol: float = 1e-12) -> float:
    """The share alpha in [0, 1] with E[X_e h'(alpha X_e)] = rho(X_e).

    Requires the bracket h'(0) E[X_e] <= rho <= E[X_e h'(X_e)] (closed so the
    boundary identities alpha = 0 and alpha = 1 are reproduced exactly).
    The quadratic family solves in closed form; anything else bisects the
    monotone residual.
    """
    mixture = scenario.mixture
    rho = scenario.measure.rho(mixture, e)
    lo_val = scenario.premium.weighted_loss(mixture, e, 0.0)
    hi_val = scenario.premium.weighted_loss(mixture, e, 1.0)
    slack = 1e-9 * max(1.0, abs(rho))
    if not (lo_val - slack <= rho <= hi_val + slack):
        raise BracketError(
            f"interior share bracket violated at e={e}: "
            f"{lo_val} <= rho={rho} <= {hi_val} fails"
        )
    pp = scenario.premium
    if isinstance(pp, QuadraticPremium) and pp.theta2 > 0.0:
        severity = mixture.severity
        alpha = (
            rho / mixture.p(e) - (1.0 + pp.theta1) * severity.mean()
        ) / (2.0 * pp.theta2 * severity.second_moment())
        return min(max(alpha, 0.0), 1.0)
    if rho <= lo_val:
        return 0.0
    if rho >= hi_val:
        return 1.0
    return bisect_root(
        lambda a: pp.weighted_loss(mixture, e, a) - rho,
        0.0,
        1.0,
        alpha_tol,
        flo=lo_val - rho,
        fhi=hi_val - rho,
    )


def optimal_share(scenario: Scenario, e: float) -> ShareDecision:
    """Minimizing share for fixed effort, with the deciding statistics attached.

    Ties at the regime boundaries resolve to the closed-interval convention:
    full cover at g2 = 1 and no cover at g1 = h'(0).
    """
    g1_val = g1(scenario, e)
    g2_val = g2(scenario, e)
    if g2_val >= 1.0:
        return ShareDecision(1.0, Branch.FULL, g1_val, g2_val)
    if g1_val <= scenario.premium.h_prime_at_zero():
        return ShareDecision(0.0, Branch.NULL, g1_val, g2_val)
    return ShareDecision(solve_alpha_h(scenario, e), Branch.INTERIOR, g1_val, g2_val)


TVAR_CASES = ("TVaR-i", "TVaR-ii", "TVaR-iii", "TVaR-iv", "TVaR-v", "TVaR-vi")
DRM_CASES = ("DRM-i", "DRM-ii", "DRM-iii")


def classify_case(scenario: Scenario) -> str:
    """Case label deciding the interval decomposition of the effort problem.

    Tail-average measures split six ways on how g1 and g2 at zero effort and
    at the branch-switch effort straddle h'(0) and 1; other concave measures
    split three ways on the zero-effort values alone (their statistics are
    unbounded in effort). The split is exhaustive because g2 > 1 forces
    g1 > h'(0) and g1 < h'(0) forces g2 < 1.
    """
    hp0 = scenario.premium.h_prime_at_zero()
    g1_0 = g1(scenario, 0.0)
    g2_0 = g2(scenario, 0.0)
    if isinstance(scenario.measure, TVaRMeasure):
        e_b = scenario.e_beta()
        g1_eb = g1(scenario, e_b)
        g2_eb = g2(scenario, e_b)
        if g1_0 > hp0:
            if g2_0 > 1.0:
                return "TVaR-i"
            if g2_eb >= 1.0:
                return "TVaR-ii"
            return "TVaR-iii"
        if g1_eb >= hp0:
            if g2_eb >= 1.0:
                return "TVaR-iv"
            return "TVaR-v"
        return "TVaR-vi"
    if not scenario.measure.concave:
        raise UnsupportedMeasureError(
            "case classification covers tail-average and concave measures only"
        )
    if g1_0 > hp0:
        return "DRM-i" if g2_0 > 1.0 else "DRM-ii"
    return "DRM-iii"


def _threshold_interval(scenario: Scenario, e_max: float | None) -> tuple[float, float]:
    if isinstance(scenario.measure, TVaRMeasure):
        return 0.0, scenario.e_beta()
    if e_max is None:
        e_max = 100.0 * scenario.probability_scale
    return 0.0, e_max


def _solve_threshold(
    scenario: Scenario,
    residual,
    label: str,
    e_max: float | None,
    xtol: float | None,
) -> float:
    lo, hi = _threshold_interval(scenario, e_max)
    if xtol is None:
        xtol = 1e-10 * max(1.0, hi)
    f_lo = residual(lo)
    if hi <= lo:
        if abs(f_lo) <= 1e-12:
            return lo
        raise ThresholdAbsentError(f"{label}: degenerate search interval at {lo}")
    f_hi = residual(hi)
    if f_lo > 0.0 or f_hi < 0.0:
        raise ThresholdAbsentError(
            f"{label}: no crossing on [{lo}, {hi}] (residuals {f_lo}, {f_hi})"
        )
    return bisect_root(residual, lo, hi, xtol, flo=f_lo, fhi=f_hi)


def solve_e_g1(
    scenario: Scenario, e_max: float | None = None, xtol: float | None = None
) -> float:
    """Effort where g1 crosses the marginal price h'(0); unique by monotonicity."""
    hp0 = scenario.premium.h_prime_at_zero()
    return _solve_threshold(
        scenario, lambda e: g1(scenario, e) - hp0, "g1 threshold", e_max, xtol
    )


def solve_e_g2(
    scenario: Scenario, e_max: float | None = None, xtol: float | None = None
) -> float:
    """Effort where g2 crosses 1; unique by monotonicity."""
    return _solve_threshold(
        scenario, lambda e: g2(scenario, e) - 1.0, "g2 threshold", e_max, xtol
    )
