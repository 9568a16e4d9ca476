"""Case-partition boundaries along a swept parameter.

Sweeping a premium loading, confidence level, or distortion exponent moves
the scenario through the solver cases; the boundaries are the parameter
values where one of the deciding comparisons turns into an equality:

    g2(0) = 1,  g1(0) = h'(0),  g2(e_switch) = 1,  g1(e_switch) = h'(0)

(the last two only for tail-average measures, evaluated at the
branch-switch effort). Each residual is scanned over the sweep range and
its crossings bisected.
"""

from __future__ import annotations

from typing import Callable

from .config import ScenarioConfig, build_scenario, set_parameter
from .distortion import TVaRMeasure
from .inner import Scenario, g1, g2
from .rootfind import bisect_root, sign_change_brackets

BOUNDARY_NAMES = ("G2_at_0", "G1_at_0", "G2_at_ebeta", "G1_at_ebeta")


def _residuals(scenario: Scenario) -> dict[str, float]:
    hp0 = scenario.premium.h_prime_at_zero()
    out = {
        "G2_at_0": g2(scenario, 0.0) - 1.0,
        "G1_at_0": g1(scenario, 0.0) - hp0,
    }
    if isinstance(scenario.measure, TVaRMeasure):
        e_b = scenario.e_beta()
        out["G2_at_ebeta"] = g2(scenario, e_b) - 1.0
        out["G1_at_ebeta"] = g1(scenario, e_b) - hp0
    return out


def boundary_residual(
    config: ScenarioConfig, parameter: str, name: str
) -> Callable[[float], float]:
    def residual(value: float) -> float:
        scenario = build_scenario(set_parameter(config, parameter, value))
        return _residuals(scenario)[name]

    return residual


def partition_thresholds(
    config: ScenarioConfig,
    parameter: str | None = None,
    lo: float | None = None,
    hi: float | None = None,
    n_scan: int = 256,
    xtol: float | None = None,
) -> dict[str, float]:
    """Boundary parameter values inside [lo, hi], keyed by comparison name.

    Defaults come from the config's sweep block. Boundaries whose residual
    never changes sign on the range are omitted.
    """
    if parameter is None or lo is None or hi is None:
        if config.sweep is None:
            raise ValueError("no sweep block and no explicit range given")
        parameter = parameter or config.sweep.parameter
        lo = config.sweep.start if lo is None else lo
        hi = config.sweep.stop if hi is None else hi
    if xtol is None:
        xtol = 1e-10 * max(1.0, abs(hi - lo))

    probe = build_scenario(set_parameter(config, parameter, 0.5 * (lo + hi)))
    names = list(_residuals(probe).keys())

    out: dict[str, float] = {}
    for name in names:
        residual = boundary_residual(config, parameter, name)
        brackets = sign_change_brackets(residual, lo, hi, n_scan)
        if not brackets:
            continue
        a, b, fa, fb = brackets[0]
        out[name] = bisect_root(residual, a, b, xtol, flo=fa, fhi=fb)
    return out
