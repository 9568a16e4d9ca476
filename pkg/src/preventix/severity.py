"""Loss-severity models: quantiles, survival, moments, and tail integrals.

All downstream risk formulas consume the severity through its quantile
function and integrals of it, so a generic model is specified by the
quantile alone; the survival function is recovered by bisection. The
Pareto family carries closed forms for everything.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable

from scipy import integrate

from .errors import DomainError

# Quantile integrands diverge at u = 1 for heavy tails; they are integrable
# but must be truncated just short of the endpoint.
U_CUTOFF = 1.0 - 1e-12
QUAD_REL_TOL = 1e-8
_SURVIVAL_TOL = 1e-12


class SeverityModel(ABC):
    """Strictly positive loss severity, specified by its quantile function."""

    @abstractmethod
    def quantile(self, u: float) -> float:
        """Value-at-risk of the severity at level u in (0, 1)."""

    def lower_support(self) -> float:
        return self.quantile(1e-15)

    def survival(self, x: float) -> float:
        """P(Y > x), derived by bisecting the quantile function."""
        if x < self.lower_support():
            return 1.0
        if x >= self.quantile(U_CUTOFF):
            return 1.0 - U_CUTOFF
        lo, hi = 0.0, 1.0 - 1e-15
        while hi - lo > _SURVIVAL_TOL:
            mid = 0.5 * (lo + hi)
            if self.quantile(max(mid, 1e-15)) <= x:
                lo = mid
            else:
                hi = mid
        return 1.0 - 0.5 * (lo + hi)

    def cdf(self, x: float) -> float:
        return 1.0 - self.survival(x)

    def mean(self) -> float:
        return self.tail_integral(0.0, 1.0)

    def second_moment(self) -> float:
        val, _ = integrate.quad(
            lambda u: self.quantile(u) ** 2,
            0.0,
            U_CUTOFF,
            epsrel=QUAD_REL_TOL,
            limit=200,
        )
        return val

    def tail_integral(self, a: float, b: float) -> float:
        """Integral of the quantile over levels [a, b]."""
        _check_interval(a, b)
        if a == b:
            return 0.0
        hi = min(b, U_CUTOFF)
        lo = max(a, 0.0)
        if lo >= hi:
            return 0.0
        val, _ = integrate.quad(
            self.quantile, lo, hi, epsrel=QUAD_REL_TOL, limit=200
        )
        return val


def _check_interval(a: float, b: float) -> None:
    if not (0.0 <= a <= b <= 1.0):
        raise DomainError(f"need 0 <= a <= b <= 1, got a={a}, b={b}")


def _check_level(u: float) -> None:
    if not (0.0 < u < 1.0):
        raise DomainError(f"quantile level must lie in (0, 1), got {u}")


@dataclass(frozen=True)
class ParetoSeverity(SeverityModel):
    """Pareto severity with survival (xhat/y)^k for y >= xhat.

    The shape must exceed 2 so the second moment exists; every consumer of
    this model needs it, so the constraint is enforced at construction.
    """

    xhat: float
    k: float

    def __post_init__(self) -> None:
        if not self.xhat > 0.0:
            raise DomainError(f"Pareto scale must be positive, got {self.xhat}")
        if not self.k > 2.0:
            raise DomainError(
                f"Pareto shape must exceed 2 for a finite second moment, got {self.k}"
            )

    def quantile(self, u: float) -> float:
        _check_level(u)
        return self.xhat * (1.0 - u) ** (-1.0 / self.k)

    def lower_support(self) -> float:
        return self.xhat

    def survival(self, x: float) -> float:
        if x < self.xhat:
            return 1.0
        return (self.xhat / x) ** self.k

    def mean(self) -> float:
        return self.xhat * self.k / (self.k - 1.0)

    def second_moment(self) -> float:
        return self.xhat**2 * self.k / (self.k - 2.0)

    def tail_integral(self, a: float, b: float) -> float:
        _check_interval(a, b)
        ex = 1.0 - 1.0 / self.k
        return self.mean() * ((1.0 - a) ** ex - (1.0 - b) ** ex)

    def scaled(self, factor: float) -> "ParetoSeverity":
        return ParetoSeverity(self.xhat * factor, self.k)


class QuantileSeverity(SeverityModel):
    """Severity given by an arbitrary non-decreasing quantile function."""

    def __init__(self, quantile_fn: Callable[[float], float], name: str = "generic"):
        self._quantile_fn = quantile_fn
        self.name = name
        grid = [i / 64.0 for i in range(1, 64)]
        vals = [quantile_fn(u) for u in grid]
        if vals[0] <= 0.0:
            raise DomainError("severity must be strictly positive")
        for left, right in zip(vals, vals[1:]):
            if right < left - 1e-12 * max(1.0, abs(left)):
                raise DomainError("quantile function must be non-decreasing")

    def quantile(self, u: float) -> float:
        _check_level(u)
        return self._quantile_fn(u)

    def __repr__(self) -> str:  # pragma: no cover
        return f"QuantileSeverity({self.name})"
