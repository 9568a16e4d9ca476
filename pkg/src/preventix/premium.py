"""Convex premium principles and the two functionals the solvers consume.

A principle is a non-decreasing convex h with h(0) = 0 and h(x) >= x; the
premium charged for ceding a fraction alpha of the mixture loss is
E[h(alpha * X_e)] and the share equation needs E[X_e * h'(alpha * X_e)].
Both reduce to severity expectations scaled by p(e) because the loss is
zero off the severity event.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

from scipy import integrate

from .errors import DomainError
from .prevention import MixtureLoss
from .severity import QUAD_REL_TOL, SeverityModel, U_CUTOFF


def _check_x(x: float) -> None:
    if x < 0.0:
        raise DomainError(f"premium functions are defined on x >= 0, got {x}")


def _check_share(alpha: float) -> None:
    if not (0.0 <= alpha <= 1.0):
        raise DomainError(f"coinsurance share must lie in [0, 1], got {alpha}")


def _check_effort(e: float) -> None:
    if e < 0.0:
        raise DomainError(f"effort must be non-negative, got {e}")


class PremiumPrinciple(ABC):
    """Convex loading function h plus the mixture functionals built on it."""

    @abstractmethod
    def h(self, x: float) -> float: ...

    @abstractmethod
    def h_prime(self, x: float) -> float: ...

    @property
    @abstractmethod
    def strictly_convex(self) -> bool:
        """Whether uniqueness arguments relying on strict convexity apply."""

    def h_prime_at_zero(self) -> float:
        return self.h_prime(0.0)

    def expected_h(self, severity: SeverityModel, alpha: float) -> float:
        """E[h(alpha * Y)] by quantile quadrature."""
        if alpha == 0.0:
            return 0.0
        val, _ = integrate.quad(
            lambda u: self.h(alpha * severity.quantile(u)),
            0.0,
            U_CUTOFF,
            epsrel=QUAD_REL_TOL,
            limit=200,
        )
        return val

    def expected_weighted(self, severity: SeverityModel, alpha: float) -> float:
        """E[Y * h'(alpha * Y)] by quantile quadrature."""
        val, _ = integrate.quad(
            lambda u: severity.quantile(u) * self.h_prime(alpha * severity.quantile(u)),
            0.0,
            U_CUTOFF,
            epsrel=QUAD_REL_TOL,
            limit=200,
        )
        return val

    def premium(self, mixture: MixtureLoss, e: float, alpha: float) -> float:
        """E[h(alpha * X_e)] = p(e) * E[h(alpha * Y)]."""
        _check_share(alpha)
        _check_effort(e)
        if alpha == 0.0:
            return 0.0
        return mixture.p(e) * self.expected_h(mixture.severity, alpha)

    def weighted_loss(self, mixture: MixtureLoss, e: float, alpha: float) -> float:
        """E[X_e * h'(alpha * X_e)] = p(e) * E[Y * h'(alpha * Y)].

        Non-decreasing in alpha by convexity of h, which is what makes the
        interior share equation solvable by bisection.
        """
        _check_share(alpha)
        _check_effort(e)
        return mixture.p(e) * self.expected_weighted(mixture.severity, alpha)


@dataclass(frozen=True)
class QuadraticPremium(PremiumPrinciple):
    """h(x) = (1 + theta1) x + theta2 x^2.

    theta2 = 0 collapses to the expected-value principle, whose flat marginal
    price breaks the uniqueness of interior shares; it is accepted only in
    expected-value compatibility mode, which the oracle uses for cross-checks
    and the case-based solvers never do.
    """

    theta1: float
    theta2: float
    expected_value_ok: bool = False

    def __post_init__(self) -> None:
        if self.theta1 < 0.0:
            raise DomainError(f"theta1 must be non-negative, got {self.theta1}")
        if self.theta2 < 0.0:
            raise DomainError(f"theta2 must be non-negative, got {self.theta2}")
        if self.theta2 == 0.0 and not self.expected_value_ok:
            raise DomainError(
                "theta2 = 0 gives the expected-value principle; pass "
                "expected_value_ok=True if that is intended (oracle mode only)"
            )

    @property
    def strictly_convex(self) -> bool:
        return self.theta2 > 0.0

    def h(self, x: float) -> float:
        _check_x(x)
        return (1.0 + self.theta1) * x + self.theta2 * x * x

    def h_prime(self, x: float) -> float:
        _check_x(x)
        return (1.0 + self.theta1) + 2.0 * self.theta2 * x

    def expected_h(self, severity: SeverityModel, alpha: float) -> float:
        return (
            (1.0 + self.theta1) * alpha * severity.mean()
            + self.theta2 * alpha * alpha * severity.second_moment()
        )

    def expected_weighted(self, severity: SeverityModel, alpha: float) -> float:
        return (
            (1.0 + self.theta1) * severity.mean()
            + 2.0 * self.theta2 * alpha * severity.second_moment()
        )


@dataclass(frozen=True)
class StopLossPremium(PremiumPrinciple):
    """h(x) = x + theta * (x - delta)_+ with the right derivative at the kink.

    Convex but not strictly so; solvers accept it but flag that strict
    separation of the share thresholds may degenerate to equalities.
    """

    theta: float
    delta: float

    def __post_init__(self) -> None:
        if self.theta < 0.0:
            raise DomainError(f"theta must be non-negative, got {self.theta}")
        if not self.delta > 0.0:
            raise DomainError(f"delta must be positive, got {self.delta}")

    @property
    def strictly_convex(self) -> bool:
        return False

    def h(self, x: float) -> float:
        _check_x(x)
        return x + self.theta * max(x - self.delta, 0.0)

    def h_prime(self, x: float) -> float:
        _check_x(x)
        return 1.0 + (self.theta if x >= self.delta else 0.0)
