import numpy as np
import pytest

from preventix.distortion import PowerDistortion, TVaRMeasure
from preventix.inner import Scenario
from preventix.premium import QuadraticPremium
from preventix.prevention import (
    HyperbolicLossProbability,
    MixtureLoss,
    PreventionSpec,
    QuadraticCost,
)
from preventix.severity import ParetoSeverity

FIXTURES = "fixtures"


def make_scenario(
    xhat=2.0,
    k=2.5,
    gamma1=9.0,
    gamma2=25.0,
    kappa=0.1,
    theta1=4.5,
    theta2=0.1,
    measure=None,
):
    severity = ParetoSeverity(xhat, k)
    prevention = PreventionSpec(
        HyperbolicLossProbability(gamma1, gamma2), QuadraticCost(kappa)
    )
    if measure is None:
        measure = TVaRMeasure(0.95)
    return Scenario(
        mixture=MixtureLoss(prevention=prevention, severity=severity),
        premium=QuadraticPremium(theta1, theta2),
        measure=measure,
    )


@pytest.fixture
def base_scenario():
    """The workhorse configuration: Pareto(2, 2.5), hyperbolic p with
    p(0) = 0.36, quadratic cost 0.1 e^2, quadratic premium (4.5, 0.1),
    tail-average measure at 0.95."""
    return make_scenario()


@pytest.fixture
def power_scenario():
    """Power-distortion configuration with Pareto(1, 4) and p(0) = 0.013."""
    return make_scenario(
        xhat=1.0,
        k=4.0,
        gamma1=0.13,
        gamma2=10.0,
        kappa=0.01,
        theta1=3.0,
        theta2=2.0,
        measure=PowerDistortion(0.5),
    )


def random_scenario(rng: np.random.Generator) -> Scenario:
    """Draw one scenario from the comparative-statics parameter ranges."""
    k = rng.uniform(2.2, 5.5)
    xhat = rng.uniform(0.5, 5.0)
    gamma2 = rng.uniform(0.8, 30.0)
    gamma1 = gamma2 * rng.uniform(0.05, 0.9)
    kappa = rng.uniform(0.01, 1.0)
    theta1 = rng.uniform(0.0, 20.0)
    theta2 = rng.uniform(0.05, 2.5)
    if rng.random() < 0.5:
        measure = TVaRMeasure(rng.uniform(0.7, 0.97))
    else:
        measure = PowerDistortion(rng.uniform(max(0.35, 1.1 / k), 0.9))
    return make_scenario(
        xhat=xhat,
        k=k,
        gamma1=gamma1,
        gamma2=gamma2,
        kappa=kappa,
        theta1=theta1,
        theta2=theta2,
        measure=measure,
    )
