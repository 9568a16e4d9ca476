"""Semantic exception hierarchy.

Public functions raise these instead of bare ValueError so callers (and
the CLI exit-code mapping) can tell configuration mistakes apart from
solver diagnostics.
"""


class PreventixError(Exception):
    """Base class for all package errors."""


class DomainError(PreventixError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(PreventixError, ValueError):
    """A scenario file or override violates the configuration contract."""


class InfiniteRiskError(PreventixError):
    """The configured risk measure of the loss is not finite."""


class DegenerateEffortError(PreventixError):
    """The loss probability is numerically zero, so ratios are undefined."""


class UnsupportedMeasureError(PreventixError):
    """The measure lies outside what the case-based solvers cover."""


class ThresholdAbsentError(PreventixError):
    """A requested regime-switch effort does not exist on the search interval."""


class BracketError(PreventixError):
    """A root or minimum was requested without a valid enclosing bracket."""


class SolverDiagnosticError(PreventixError):
    """A solver safeguard tripped; results would not be trustworthy."""
