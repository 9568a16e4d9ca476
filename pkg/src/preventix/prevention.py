"""Effort-dependent loss frequency, effort cost, and the zero-inflated mixture.

The loss equals a positive severity draw with probability p(e) and zero
otherwise, where the prevention effort e lowers p. Families are pluggable
behind a small evaluation contract; the shipped ones are the hyperbolic
probability p(e) = g1/(g2 + e) and the quadratic cost c(e) = kappa * e^2.
New families must pass the grid-based shape validation below, since every
solver guarantee is conditional on those shape properties.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError
from .severity import SeverityModel


def _check_effort(e: float) -> None:
    if e < 0.0:
        raise DomainError(f"effort must be non-negative, got {e}")


class LossProbability(ABC):
    """Non-increasing, strictly convex loss probability of effort."""

    #: family-level statement that p(e) -> 0 as e -> infinity
    vanishes_at_infinity: bool = True

    @abstractmethod
    def p(self, e: float) -> float: ...

    @abstractmethod
    def p_prime(self, e: float) -> float: ...

    @property
    @abstractmethod
    def scale(self) -> float:
        """Characteristic effort scale used to size grids and search caps."""

    @property
    def p0(self) -> float:
        return self.p(0.0)

    def p_inverse(self, q: float) -> float:
        """Effort at which the loss probability equals q (0 < q <= p(0))."""
        if not (0.0 < q <= self.p0):
            raise DomainError(f"target probability {q} outside (0, p(0)={self.p0}]")
        lo, hi = 0.0, self.scale
        while self.p(hi) > q:
            hi *= 2.0
            if hi > 1e18:
                raise DomainError("loss probability does not reach the target")
        for _ in range(200):
            if hi - lo <= 1e-13 * max(1.0, hi):
                break
            mid = 0.5 * (lo + hi)
            if self.p(mid) > q:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)


@dataclass(frozen=True)
class HyperbolicLossProbability(LossProbability):
    """p(e) = gamma1 / (gamma2 + e) with 0 < gamma1 < gamma2."""

    gamma1: float
    gamma2: float

    def __post_init__(self) -> None:
        if not (0.0 < self.gamma1 < self.gamma2):
            raise DomainError(
                f"need 0 < gamma1 < gamma2, got gamma1={self.gamma1}, gamma2={self.gamma2}"
            )

    def p(self, e: float) -> float:
        _check_effort(e)
        return self.gamma1 / (self.gamma2 + e)

    def p_prime(self, e: float) -> float:
        _check_effort(e)
        return -self.gamma1 / (self.gamma2 + e) ** 2

    def p_inverse(self, q: float) -> float:
        if not (0.0 < q <= self.p0):
            raise DomainError(f"target probability {q} outside (0, p(0)={self.p0}]")
        return self.gamma1 / q - self.gamma2

    @property
    def scale(self) -> float:
        return self.gamma2


class EffortCost(ABC):
    """Strictly convex effort cost with c(0) = 0 and c'(0) = 0."""

    #: family-level statement that c(e) -> infinity as e -> infinity
    diverges_at_infinity: bool = True

    @abstractmethod
    def cost(self, e: float) -> float: ...

    @abstractmethod
    def cost_prime(self, e: float) -> float: ...


@dataclass(frozen=True)
class QuadraticCost(EffortCost):
    """c(e) = kappa * e^2 with kappa > 0."""

    kappa: float

    def __post_init__(self) -> None:
        if not self.kappa > 0.0:
            raise DomainError(f"cost coefficient must be positive, got {self.kappa}")

    def cost(self, e: float) -> float:
        _check_effort(e)
        return self.kappa * e * e

    def cost_prime(self, e: float) -> float:
        _check_effort(e)
        return 2.0 * self.kappa * e


@dataclass(frozen=True)
class PreventionSpec:
    """Loss probability and effort cost, bundled."""

    probability: LossProbability
    cost: EffortCost


@dataclass(frozen=True)
class MixtureLoss:
    """Loss that is zero with probability 1 - p(e) and a severity draw otherwise."""

    prevention: PreventionSpec
    severity: SeverityModel

    def p(self, e: float) -> float:
        return self.prevention.probability.p(e)

    def p_prime(self, e: float) -> float:
        return self.prevention.probability.p_prime(e)

    def cost(self, e: float) -> float:
        return self.prevention.cost.cost(e)

    def cost_prime(self, e: float) -> float:
        return self.prevention.cost.cost_prime(e)

    def mean(self, e: float) -> float:
        return self.p(e) * self.severity.mean()

    def second_moment(self, e: float) -> float:
        return self.p(e) * self.severity.second_moment()

    def survival(self, x: float, e: float) -> float:
        if x < 0.0:
            return 1.0
        return self.p(e) * self.severity.survival(x)

    def e_beta(self, beta: float) -> float:
        """Effort at which the loss probability drops to 1 - beta.

        Below p(0) <= 1 - beta the low-frequency regime holds from e = 0,
        so the switch effort is clamped to zero.
        """
        if not (0.0 < beta < 1.0):
            raise DomainError(f"confidence level must lie in (0, 1), got {beta}")
        target = 1.0 - beta
        prob = self.prevention.probability
        if prob.p0 <= target:
            return 0.0
        return prob.p_inverse(target)

    def fsd_check(self, e1: float, e2: float, grid_size: int = 200) -> bool:
        """True iff the survival at effort e1 dominates the one at e2 pointwise."""
        if e1 < 0 or e2 < 0:
            raise DomainError("efforts must be non-negative")
        lo = self.severity.lower_support() * 0.5
        hi = self.severity.quantile(1.0 - 1e-6)
        xs = np.logspace(math.log10(max(lo, 1e-12)), math.log10(hi), grid_size)
        for x in xs:
            if self.survival(float(x), e1) < self.survival(float(x), e2) - 1e-15:
                return False
        return True


@dataclass
class AssumptionReport:
    """Machine-readable outcome of one shape-property validation."""

    name: str
    passed: bool
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "errors": list(self.errors),
            "warnings": list(self.warnings),
        }


def validate_prevention(spec: PreventionSpec, n_grid: int = 1000) -> list[AssumptionReport]:
    """Grid-based check of the probability and cost shape requirements.

    Monotonicity/convexity are tested on 1000 points of [0, 10 * scale];
    limits at infinity are family declarations, not numeric checks. Strictness
    failures degrade to warnings, hard shape violations fail the report.
    """
    prob = spec.probability
    cost = spec.cost
    hi = 10.0 * prob.scale
    es = np.linspace(0.0, hi, n_grid)

    p_report = AssumptionReport("loss_probability_shape", True)
    pv = np.array([prob.p(float(e)) for e in es])
    if not (0.0 < pv[0] < 1.0):
        p_report.errors.append(f"p(0)={pv[0]} must lie in (0, 1)")
    if np.any(np.diff(pv) > 1e-14):
        p_report.errors.append("p must be non-increasing")
    second = np.diff(pv, 2)
    if np.any(second < -1e-12):
        p_report.errors.append("p must be convex")
    elif not np.all(second > 0.0):
        p_report.warnings.append("p is convex but not strictly so on the test grid")
    if not prob.p_prime(0.0) < 0.0:
        p_report.errors.append("p'(0) must be negative")
    if not prob.vanishes_at_infinity:
        p_report.errors.append("p must vanish at infinity (family declaration)")
    p_report.passed = not p_report.errors

    c_report = AssumptionReport("effort_cost_shape", True)
    cv = np.array([cost.cost(float(e)) for e in es])
    if abs(cv[0]) > 1e-12:
        c_report.errors.append(f"c(0)={cv[0]} must vanish")
    h = hi * 1e-12
    avg_slope = cost.cost(hi) / hi
    if (cost.cost(h) - cost.cost(0.0)) / h >= 1e-8 * avg_slope + 1e-12:
        c_report.errors.append("forward difference c'(0) must vanish")
    if np.any(np.diff(cv) < -1e-14):
        c_report.errors.append("c must be non-decreasing")
    second = np.diff(cv, 2)
    if np.any(second < -1e-12):
        c_report.errors.append("c must be convex")
    elif not np.all(second > 0.0):
        c_report.warnings.append("c is convex but not strictly so on the test grid")
    if not cost.diverges_at_infinity:
        c_report.errors.append("c must diverge at infinity (family declaration)")
    c_report.passed = not c_report.errors

    return [p_report, c_report]


# Family registries; scenario files select members by name and new families
# plug in here, subject to validate_prevention at load time.
PROBABILITY_FAMILIES: dict[str, Callable[[dict], LossProbability]] = {
    "hyperbolic": lambda block: HyperbolicLossProbability(
        float(block["gamma1"]), float(block["gamma2"])
    ),
}

COST_FAMILIES: dict[str, Callable[[dict], EffortCost]] = {
    "quadratic": lambda block: QuadraticCost(float(block["kappa"])),
}


def register_probability_family(name: str, builder: Callable[[dict], LossProbability]) -> None:
    PROBABILITY_FAMILIES[name] = builder


def register_cost_family(name: str, builder: Callable[[dict], EffortCost]) -> None:
    COST_FAMILIES[name] = builder
