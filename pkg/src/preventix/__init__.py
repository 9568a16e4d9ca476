"""Optimal proportional insurance and self-protection under distortion risk measures."""

from .distortion import (
    DistortionMeasure,
    GenericConcaveDistortion,
    PowerDistortion,
    TVaRMeasure,
)
from .errors import (
    BracketError,
    ConfigError,
    DegenerateEffortError,
    DomainError,
    InfiniteRiskError,
    PreventixError,
    SolverDiagnosticError,
    ThresholdAbsentError,
    UnsupportedMeasureError,
)
from .inner import (
    Branch,
    Scenario,
    ShareDecision,
    classify_case,
    g1,
    g2,
    optimal_share,
    solve_alpha_h,
    solve_e_g1,
    solve_e_g2,
)
from .moral import (
    MoralHazardResult,
    admissible_segments,
    constrained_objective,
    incentive_share,
    solve_e_bound,
    solve_moral_hazard,
)
from .outer import (
    SolveResult,
    SolverOptions,
    k_objective,
    minimize_branch,
    solve,
)
from .premium import PremiumPrinciple, QuadraticPremium, StopLossPremium
from .prevention import (
    HyperbolicLossProbability,
    MixtureLoss,
    PreventionSpec,
    QuadraticCost,
    validate_prevention,
)
from .severity import ParetoSeverity, QuantileSeverity, SeverityModel

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "BracketError",
    "ConfigError",
    "DegenerateEffortError",
    "DistortionMeasure",
    "DomainError",
    "GenericConcaveDistortion",
    "HyperbolicLossProbability",
    "InfiniteRiskError",
    "MixtureLoss",
    "MoralHazardResult",
    "ParetoSeverity",
    "PowerDistortion",
    "PremiumPrinciple",
    "PreventionSpec",
    "PreventixError",
    "QuadraticCost",
    "QuadraticPremium",
    "QuantileSeverity",
    "Scenario",
    "SeverityModel",
    "ShareDecision",
    "SolveResult",
    "SolverDiagnosticError",
    "SolverOptions",
    "StopLossPremium",
    "TVaRMeasure",
    "ThresholdAbsentError",
    "UnsupportedMeasureError",
    "admissible_segments",
    "classify_case",
    "constrained_objective",
    "g1",
    "g2",
    "incentive_share",
    "k_objective",
    "minimize_branch",
    "optimal_share",
    "solve",
    "solve_alpha_h",
    "solve_e_bound",
    "solve_e_g1",
    "solve_e_g2",
    "solve_moral_hazard",
    "validate_prevention",
]
