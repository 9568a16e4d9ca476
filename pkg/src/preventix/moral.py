"""Hidden-effort (ex-ante moral hazard) solver.

When the insurer cannot observe the prevention effort, the chosen effort
must be self-enforcing: given the share alpha, the insured's own problem
min_b (1 - alpha) rho(X_b) + c(b) must be solved by that effort. Its
first-order condition ties the share to the effort through

    alpha = H(e) = 1 + c'(e) / rho'(X_e),

valid on the admissible set B = {e > 0 : c'(e) + rho'(X_e) <= 0}, i.e. up
to the effort where marginal cost swallows the marginal risk reduction.
The constrained objective L is minimized over {0} union B and compared
against the no-effort, full-cover corner (e, alpha) = (0, 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .distortion import TVaRMeasure
from .errors import BracketError, DegenerateEffortError, SolverDiagnosticError
from .inner import Scenario
from .outer import DEFAULT_OPTIONS, SolverOptions
from .rootfind import bisect_root, golden_min


@dataclass
class MoralHazardResult:
    e_star: float
    alpha_star: float
    objective: float
    e_bound: float | None
    corner_taken: bool
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "e_star": self.e_star,
            "alpha_star": self.alpha_star,
            "objective": self.objective,
            "e_B": self.e_bound,
            "corner_taken": self.corner_taken,
            "diagnostics": dict(self.diagnostics),
        }


def _rho_prime_right(scenario: Scenario, e: float) -> float:
    rp = scenario.measure.rho_prime(scenario.mixture, e)
    if isinstance(rp, tuple):
        rp = rp[1]
    return rp


def incentive_share(scenario: Scenario, e: float) -> float:
    """Share alpha = H(e) that makes effort e self-enforcing.

    H(0) = 1 exactly (zero marginal cost at zero effort); at the
    tail-average branch switch the right branch applies.
    """
    if e == 0.0:
        return 1.0
    rp = _rho_prime_right(scenario, e)
    if rp == 0.0:
        raise DegenerateEffortError(
            f"risk measure has zero effort-derivative at e={e}"
        )
    return 1.0 + scenario.mixture.cost_prime(e) / rp


def _marginal_balance(scenario: Scenario, e: float) -> float:
    """c'(e) + rho'(X_e); the admissible set is where this is non-positive."""
    return scenario.mixture.cost_prime(e) + _rho_prime_right(scenario, e)


def admissible_segments(
    scenario: Scenario, options: SolverOptions = DEFAULT_OPTIONS
) -> list[tuple[float, float]]:
    """Closed sub-intervals of (0, cap] where effort is self-enforceable.

    The balance c' + rho' starts negative, is increasing on each smooth
    branch, and (for tail-average measures) jumps down at the branch-switch
    effort, so the set is one interval or, in principle, two; each piece is
    scanned for sign changes and the crossings are bisected.
    """
    scale = scenario.scale()
    eps = 1e-12 * scale
    delta = 1e-9 * scale
    cap = 10.0 * scale
    for _ in range(options.tail_cap_doublings):
        if _marginal_balance(scenario, cap) > 0.0:
            break
        cap *= 2.0
    else:
        raise SolverDiagnosticError(
            "marginal cost never dominates marginal risk reduction"
        )

    pieces: list[tuple[float, float]] = []
    e_b = scenario.e_beta()
    if e_b is not None and eps < e_b - delta < cap:
        pieces.append((eps, e_b - delta))
        pieces.append((e_b + delta, cap))
    else:
        pieces.append((eps, cap))

    segments: list[tuple[float, float]] = []
    n = 512
    for lo, hi in pieces:
        if hi <= lo:
            continue
        es = np.linspace(lo, hi, n)
        vals = np.array([_marginal_balance(scenario, float(e)) for e in es])
        neg = vals <= 0.0
        i = 0
        while i < n:
            if not neg[i]:
                i += 1
                continue
            j = i
            while j + 1 < n and neg[j + 1]:
                j += 1
            seg_lo = float(es[i])
            seg_hi = float(es[j])
            if i > 0:
                seg_lo = bisect_root(
                    lambda e: _marginal_balance(scenario, e),
                    float(es[i - 1]),
                    float(es[i]),
                    1e-12 * scale,
                )
            if j + 1 < n:
                seg_hi = bisect_root(
                    lambda e: _marginal_balance(scenario, e),
                    float(es[j]),
                    float(es[j + 1]),
                    1e-12 * scale,
                )
            segments.append((seg_lo, seg_hi))
            i = j + 1
    # pieces excluded a sliver around the branch-switch effort; re-join
    # segments that are only separated by that sliver
    merged: list[tuple[float, float]] = []
    for seg in segments:
        if merged and seg[0] - merged[-1][1] <= 4.0 * delta:
            merged[-1] = (merged[-1][0], seg[1])
        else:
            merged.append(seg)
    return merged


def solve_e_bound(
    scenario: Scenario, options: SolverOptions = DEFAULT_OPTIONS
) -> float:
    """Largest self-enforceable effort (right endpoint of the admissible set)."""
    segments = admissible_segments(scenario, options)
    if not segments:
        raise BracketError("admissible effort set is empty")
    return segments[-1][1]


def constrained_objective(scenario: Scenario, e: float, check: bool = True) -> float:
    """Objective along the incentive-compatible curve, or at the corner e = 0.

    The corner value E[h(X_0)] is evaluated through the premium closed form,
    never by quadrature: it is the global answer in degenerate regimes and
    must carry no integration error.
    """
    mixture = scenario.mixture
    if e == 0.0:
        return scenario.premium.premium(mixture, 0.0, 1.0)
    if e < 0.0:
        raise BracketError(f"effort must be non-negative, got {e}")
    if check and _marginal_balance(scenario, e) > 1e-9 * max(1.0, scenario.scale()):
        raise BracketError(f"effort {e} lies outside the admissible set")
    alpha = incentive_share(scenario, e)
    alpha = min(max(alpha, 0.0), 1.0)
    rho = scenario.measure.rho(mixture, e)
    prem = scenario.premium.premium(mixture, e, alpha)
    return rho * (1.0 - alpha) + prem + mixture.cost(e)


def _check_incentive_convexity(
    scenario: Scenario, alpha: float, hi: float, n: int = 200
) -> bool:
    es = np.linspace(0.0, hi, n)
    vals = np.array(
        [
            (1.0 - alpha) * scenario.measure.rho(scenario.mixture, float(e))
            + scenario.mixture.cost(float(e))
            for e in es
        ]
    )
    second = np.diff(vals, 2)
    tol = 1e-8 * max(1.0, float(np.max(np.abs(vals))))
    return bool(np.all(second >= -tol))


def incentive_check(
    scenario: Scenario, result: "MoralHazardResult", n: int | None = None
) -> bool:
    """Re-derive the insured's best response on a grid and compare.

    With alpha fixed at the reported share, the grid argmin of
    (1 - alpha) rho(X_b) + c(b) over [0, 4 e_B] must coincide with the
    reported effort up to the grid resolution.
    """
    if result.corner_taken or result.e_bound is None:
        return True
    hi = 4.0 * result.e_bound
    if n is None:
        n = max(int(hi / 1e-3), 1000)
    n = min(n, 200_000)
    alpha = result.alpha_star
    es = np.linspace(0.0, hi, n + 1)
    vals = np.array(
        [
            (1.0 - alpha) * scenario.measure.rho(scenario.mixture, float(b))
            + scenario.mixture.cost(float(b))
            for b in es
        ]
    )
    best = float(es[int(np.argmin(vals))])
    step = hi / n
    return abs(best - result.e_star) <= 2.0 * step


def solve_moral_hazard(
    scenario: Scenario, options: SolverOptions = DEFAULT_OPTIONS
) -> MoralHazardResult:
    """Minimize the constrained objective over {0} union the admissible set.

    Each admissible segment is grid-scanned (the incentive map makes the
    objective's smoothness unreliable near the branch switch) and the best
    bracket is polished by golden section; the corner is always compared
    exactly. Ties break toward smaller effort.
    """
    mixture = scenario.mixture
    corner_value = scenario.premium.premium(mixture, 0.0, 1.0)
    diagnostics: dict[str, Any] = {}

    segments = admissible_segments(scenario, options)
    diagnostics["admissible_segments"] = [list(s) for s in segments]
    if len(segments) > 1:
        diagnostics["admissible_disconnected"] = True
    if not segments:
        diagnostics["admissible_empty"] = True
        return MoralHazardResult(
            e_star=0.0,
            alpha_star=1.0,
            objective=corner_value,
            e_bound=None,
            corner_taken=True,
            diagnostics=diagnostics,
        )

    e_bound = segments[-1][1]
    xtol = options.e_tol_factor * scenario.scale()
    f = lambda e: constrained_objective(scenario, e, check=False)

    best_e, best_val = 0.0, corner_value
    for lo, hi in segments:
        n = options.mh_grid
        es = np.linspace(lo, hi, n)
        vals = np.array([f(float(e)) for e in es])
        i = int(np.argmin(vals))
        a = float(es[max(i - 1, 0)])
        b = float(es[min(i + 1, n - 1)])
        e_ref, v_ref = golden_min(f, a, b, xtol)
        if v_ref < best_val - options.tie_tol or (
            abs(v_ref - best_val) <= options.tie_tol and e_ref < best_e
        ):
            best_e, best_val = e_ref, v_ref

    # jump of L at the branch-switch effort, reported not hidden
    e_b = scenario.e_beta()
    if e_b is not None and any(lo < e_b < hi for lo, hi in segments):
        delta = 1e-7 * scenario.scale()
        diagnostics["objective_jump_at_e_beta"] = abs(
            f(e_b + delta) - f(e_b - delta)
        )

    corner_taken = best_e == 0.0
    alpha_star = 1.0 if corner_taken else min(max(incentive_share(scenario, best_e), 0.0), 1.0)
    diagnostics["incentive_convex"] = _check_incentive_convexity(
        scenario, alpha_star, 2.0 * e_bound
    )
    return MoralHazardResult(
        e_star=best_e,
        alpha_star=alpha_star,
        objective=best_val if not corner_taken else corner_value,
        e_bound=e_bound,
        corner_taken=corner_taken,
        diagnostics=diagnostics,
    )
