"""Distortion risk measures of the zero-inflated loss mixture.

A distortion function g (non-decreasing, g(0) = 0, g(1) = 1) induces the
risk functional rho_g(Z) = integral of g(S_Z(t)) dt. For the mixture the
measure reduces to a Stieltjes integral of the severity quantile against g
over (0, p(e)). The tail-average measure (TVaR) gets analytic piecewise
branches because the outer solver evaluates it thousands of times per
sweep point; generic quadrature exists for arbitrary concave distortions
and for cross-validation.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import DegenerateEffortError, DomainError, InfiniteRiskError
from .prevention import MixtureLoss
from .severity import ParetoSeverity, U_CUTOFF

_P_FLOOR = 1e-300


def _check_effort(e: float) -> None:
    if e < 0.0:
        raise DomainError(f"effort must be non-negative, got {e}")


def _fd_derivative(f: Callable[[float], float], e: float, step: float) -> float:
    if e - step < 0.0:
        return (f(e + step) - f(e)) / step
    return (f(e + step) - f(e - step)) / (2.0 * step)


class DistortionMeasure(ABC):
    """Risk measure rho_g evaluated on the effort-indexed mixture."""

    concave: bool = True

    @abstractmethod
    def g(self, t: float) -> float:
        """Distortion function on [0, 1]."""

    @abstractmethod
    def rho(self, mixture: MixtureLoss, e: float) -> float:
        """rho_g(X_e)."""

    def rho_prime(self, mixture: MixtureLoss, e: float):
        """d/de rho_g(X_e), Richardson-extrapolated central difference.

        The step pair (h, h/2) with h = 1e-6 * max(1, e) keeps the noise well
        below what the incentive fixed point can tolerate.
        """
        _check_effort(e)
        h = 1e-6 * max(1.0, e)
        d1 = _fd_derivative(lambda x: self.rho(mixture, x), e, h)
        d2 = _fd_derivative(lambda x: self.rho(mixture, x), e, h / 2.0)
        return (4.0 * d2 - d1) / 3.0


class TVaRMeasure(DistortionMeasure):
    """Tail-average measure at confidence level beta, g(t) = min(1, t/(1-beta)).

    The measure of the mixture switches branch at the effort where the loss
    probability falls to 1 - beta: below it the tail still contains zero-loss
    mass, above it the whole severity distribution sits inside the tail.
    """

    concave = True

    def __init__(self, beta: float):
        if not (0.0 < beta < 1.0):
            raise DomainError(f"confidence level must lie in (0, 1), got {beta}")
        self.beta = beta

    def g(self, t: float) -> float:
        return min(1.0, t / (1.0 - self.beta))

    def tail_level(self, mixture: MixtureLoss, e: float) -> float:
        """Severity quantile level (beta + p(e) - 1) / p(e) for the high-frequency branch."""
        p = mixture.p(e)
        return (self.beta + p - 1.0) / p

    def var(self, mixture: MixtureLoss, e: float) -> float:
        """Value-at-risk of the mixture at level beta."""
        _check_effort(e)
        p = mixture.p(e)
        if self.beta <= 1.0 - p:
            return 0.0
        return mixture.severity.quantile(self.tail_level(mixture, e))

    def rho(self, mixture: MixtureLoss, e: float) -> float:
        _check_effort(e)
        p = mixture.p(e)
        one_minus = 1.0 - self.beta
        if p > one_minus:
            level = self.tail_level(mixture, e)
            return p / one_minus * mixture.severity.tail_integral(level, 1.0)
        return p * mixture.severity.mean() / one_minus

    def rho_prime(self, mixture: MixtureLoss, e: float):
        """Analytic piecewise derivative in effort.

        At the branch-switch effort itself the derivative has a genuine kink;
        the pair of one-sided values is returned there.
        """
        _check_effort(e)
        e_b = mixture.e_beta(self.beta)
        if e_b > 0.0 and e == e_b:
            return (self._slope_low(mixture, e), self._slope_high(mixture, e))
        if e < e_b:
            return self._slope_low(mixture, e)
        return self._slope_high(mixture, e)

    def _slope_low(self, mixture: MixtureLoss, e: float) -> float:
        p = mixture.p(e)
        dp = mixture.p_prime(e)
        level = min(self.tail_level(mixture, e), 1.0 - 1e-15)
        level = max(level, 0.0)
        tail = mixture.severity.tail_integral(level, 1.0)
        quantile = (
            mixture.severity.lower_support()
            if level <= 0.0
            else mixture.severity.quantile(level)
        )
        return dp / (1.0 - self.beta) * tail - dp / p * quantile

    def _slope_high(self, mixture: MixtureLoss, e: float) -> float:
        return mixture.severity.mean() * mixture.p_prime(e) / (1.0 - self.beta)


class PowerDistortion(DistortionMeasure):
    """Concave power distortion g(u) = u^r with r in (0, 1)."""

    concave = True

    def __init__(self, r: float):
        if not (0.0 < r < 1.0):
            raise DomainError(f"power exponent must lie in (0, 1), got {r}")
        self.r = r

    def g(self, t: float) -> float:
        return t**self.r

    def rho(self, mixture: MixtureLoss, e: float) -> float:
        _check_effort(e)
        severity = mixture.severity
        p = mixture.p(e)
        if isinstance(severity, ParetoSeverity):
            if severity.k * self.r <= 1.0:
                raise InfiniteRiskError(
                    f"power measure diverges for shape*exponent = "
                    f"{severity.k * self.r} <= 1"
                )
            return self.r * severity.xhat * severity.k / (severity.k * self.r - 1.0) * p**self.r
        return _stieltjes_rho(
            severity, p, g_prime=lambda u: self.r * u ** (self.r - 1.0)
        )

    def rho_prime(self, mixture: MixtureLoss, e: float):
        severity = mixture.severity
        if isinstance(severity, ParetoSeverity):
            _check_effort(e)
            if severity.k * self.r <= 1.0:
                raise InfiniteRiskError("power measure diverges")
            coeff = self.r * severity.xhat * severity.k / (severity.k * self.r - 1.0)
            p = mixture.p(e)
            return coeff * self.r * p ** (self.r - 1.0) * mixture.p_prime(e)
        return super().rho_prime(mixture, e)


class GenericConcaveDistortion(DistortionMeasure):
    """Arbitrary concave distortion, validated on a grid at construction.

    When a derivative g' is supplied the measure is computed by adaptive
    quadrature after the substitution u = p(e) * t; otherwise a 2000-point
    Stieltjes partition sum is used, which also covers non-smooth g.
    """

    concave = True

    def __init__(
        self,
        g_fn: Callable[[float], float],
        g_prime: Callable[[float], float] | None = None,
        name: str = "generic",
    ):
        if abs(g_fn(0.0)) > 1e-12 or abs(g_fn(1.0) - 1.0) > 1e-12:
            raise DomainError("distortion must satisfy g(0) = 0 and g(1) = 1")
        grid = np.linspace(0.0, 1.0, 401)
        vals = np.array([g_fn(float(t)) for t in grid])
        if np.any(np.diff(vals) < -1e-12):
            raise DomainError("distortion must be non-decreasing")
        if np.any(np.diff(vals, 2) > 1e-10):
            raise DomainError("distortion must be concave")
        self._g = g_fn
        self._g_prime = g_prime
        self.name = name

    def g(self, t: float) -> float:
        return self._g(t)

    def rho(self, mixture: MixtureLoss, e: float) -> float:
        _check_effort(e)
        p = mixture.p(e)
        if self._g_prime is not None:
            return _stieltjes_rho(mixture.severity, p, g_prime=self._g_prime)
        return _partition_rho(mixture.severity, p, self._g)


def _stieltjes_rho(severity, p: float, g_prime: Callable[[float], float]) -> float:
    """Quadrature of quantile(1 - t) * g'(p t) * p over t in (0, 1).

    The integrand can blow up at t -> 0 (heavy severity tail meets a steep
    distortion); a divergent integral is reported as an infinite measure.
    """
    if p < _P_FLOOR:
        raise DegenerateEffortError("loss probability is numerically zero")

    def integrand(t: float) -> float:
        return severity.quantile(1.0 - t) * g_prime(p * t) * p

    with np.errstate(over="ignore"):
        val, err = integrate.quad(
            integrand,
            1e-13,
            U_CUTOFF,
            epsrel=1e-9,
            limit=400,
        )
    if not math.isfinite(val) or (abs(val) > 0 and err > 0.5 * abs(val)):
        raise InfiniteRiskError("distortion measure integral did not converge")
    return val


def _partition_rho(severity, p: float, g_fn: Callable[[float], float], n: int = 2000) -> float:
    """Riemann-Stieltjes partition sum for non-smooth distortions.

    The integrand pairs a quantile that blows up at the deep tail with a
    distortion that is steepest there, so the partition is geometric: cells
    shrink toward the singular corner and each carries its exact Stieltjes
    weight evaluated at the geometric midpoint.
    """
    if p < _P_FLOOR:
        raise DegenerateEffortError("loss probability is numerically zero")
    ts = np.geomspace(1e-12, 1.0, n + 1)
    mids = np.sqrt(ts[:-1] * ts[1:])
    g_vals = [g_fn(float(p * t)) for t in ts]
    weights = np.diff(g_vals)
    quantiles = np.array(
        [severity.quantile(min(1.0 - float(t), U_CUTOFF)) for t in mids]
    )
    val = float(np.dot(quantiles, weights))
    # corner cell [0, ts[0]]: bounded by the truncated quantile
    val += (g_vals[0] - g_fn(0.0)) * severity.quantile(U_CUTOFF)
    if not math.isfinite(val):
        raise InfiniteRiskError("distortion measure partition sum diverged")
    return val
