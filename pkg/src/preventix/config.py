"""Declarative scenario and sweep configuration.

Scenario files are JSON with a published schema (schema/scenario.json).
Loading validates structure, domain constraints, and the numeric shape
properties every solver guarantee is conditional on; the reports are
attached to the returned config rather than silently accepted.
"""

from __future__ import annotations

import dataclasses
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .distortion import DistortionMeasure, PowerDistortion, TVaRMeasure
from .errors import ConfigError, DomainError, InfiniteRiskError
from .inner import Scenario
from .outer import SolverOptions
from .premium import PremiumPrinciple, QuadraticPremium, StopLossPremium
from .prevention import (
    COST_FAMILIES,
    PROBABILITY_FAMILIES,
    AssumptionReport,
    MixtureLoss,
    PreventionSpec,
    validate_prevention,
)
from .severity import ParetoSeverity

MODES = ("solve", "sweep", "moral_hazard", "oracle_check")

# Scalar sweep/override parameters and the config block that owns them.
PARAM_PATHS: dict[str, tuple[str, str]] = {
    "theta1": ("premium", "theta1"),
    "theta2": ("premium", "theta2"),
    "beta": ("risk_measure", "beta"),
    "r": ("risk_measure", "r"),
    "kappa": ("cost", "kappa"),
    "gamma1": ("prevention", "gamma1"),
    "gamma2": ("prevention", "gamma2"),
}

_KNOWN_KEYS = {
    "": {"severity", "prevention", "cost", "premium", "risk_measure", "solver", "sweep", "mode", "seed"},
    "severity": {"family", "xhat", "k"},
    "prevention": {"family", "gamma1", "gamma2"},
    "cost": {"family", "kappa"},
    "premium": {"family", "theta1", "theta2", "theta", "delta"},
    "risk_measure": {"kind", "beta", "r"},
    "sweep": {"parameter", "from", "to", "steps"},
    "solver": {f.name for f in dataclasses.fields(SolverOptions)},
}


class ConfigWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    steps: int

    def value(self, index: int) -> float:
        if not (0 <= index < self.steps):
            raise ConfigError(f"sweep index {index} outside range(0, {self.steps})")
        return self.start + index * (self.stop - self.start) / (self.steps - 1)

    def values(self) -> list[float]:
        return [self.value(i) for i in range(self.steps)]


@dataclass(frozen=True)
class ScenarioConfig:
    severity: dict[str, Any]
    prevention: dict[str, Any]
    cost: dict[str, Any]
    premium: dict[str, Any]
    risk_measure: dict[str, Any]
    mode: str = "solve"
    seed: int = 0
    solver: SolverOptions = field(default_factory=SolverOptions)
    sweep: SweepSpec | None = None
    reports: tuple[AssumptionReport, ...] = field(
        default=(), compare=False, repr=False
    )

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "mode": self.mode,
            "seed": self.seed,
            "severity": dict(self.severity),
            "prevention": dict(self.prevention),
            "cost": dict(self.cost),
            "premium": dict(self.premium),
            "risk_measure": dict(self.risk_measure),
            "solver": dataclasses.asdict(self.solver),
        }
        if self.sweep is not None:
            out["sweep"] = {
                "parameter": self.sweep.parameter,
                "from": self.sweep.start,
                "to": self.sweep.stop,
                "steps": self.sweep.steps,
            }
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _warn_unknown(block_name: str, block: dict) -> None:
    unknown = set(block) - _KNOWN_KEYS[block_name]
    if unknown:
        where = block_name or "top level"
        warnings.warn(
            f"unknown keys in {where}: {sorted(unknown)}", ConfigWarning, stacklevel=3
        )


def _require(block: dict, key: str, where: str) -> Any:
    if key not in block:
        raise ConfigError(f"missing required key {key!r} in {where}")
    return block[key]


def build_severity(block: dict) -> ParetoSeverity:
    family = block.get("family", "pareto")
    if family != "pareto":
        raise ConfigError(f"unknown severity family {family!r}")
    try:
        return ParetoSeverity(float(_require(block, "xhat", "severity")),
                              float(_require(block, "k", "severity")))
    except DomainError as exc:
        raise ConfigError(f"severity: {exc}") from exc


def build_prevention(prevention_block: dict, cost_block: dict) -> PreventionSpec:
    p_family = prevention_block.get("family", "hyperbolic")
    c_family = cost_block.get("family", "quadratic")
    if p_family not in PROBABILITY_FAMILIES:
        raise ConfigError(f"unknown prevention family {p_family!r}")
    if c_family not in COST_FAMILIES:
        raise ConfigError(f"unknown cost family {c_family!r}")
    try:
        probability = PROBABILITY_FAMILIES[p_family](prevention_block)
        cost = COST_FAMILIES[c_family](cost_block)
    except KeyError as exc:
        raise ConfigError(f"missing prevention/cost parameter: {exc}") from exc
    except DomainError as exc:
        raise ConfigError(f"prevention: {exc}") from exc
    return PreventionSpec(probability=probability, cost=cost)


def build_premium(block: dict) -> PremiumPrinciple:
    family = block.get("family", "quadratic")
    try:
        if family == "quadratic":
            theta2 = float(_require(block, "theta2", "premium"))
            if theta2 <= 0.0:
                raise ConfigError(
                    "premium.theta2 must be positive: the expected-value "
                    "principle is outside the solvers' scope"
                )
            return QuadraticPremium(float(_require(block, "theta1", "premium")), theta2)
        if family == "stoploss":
            return StopLossPremium(
                float(_require(block, "theta", "premium")),
                float(_require(block, "delta", "premium")),
            )
    except DomainError as exc:
        raise ConfigError(f"premium: {exc}") from exc
    raise ConfigError(f"unknown premium family {family!r}")


def build_measure(block: dict, severity: ParetoSeverity) -> DistortionMeasure:
    kind = _require(block, "kind", "risk_measure")
    try:
        if kind == "tvar":
            return TVaRMeasure(float(_require(block, "beta", "risk_measure")))
        if kind == "power":
            r = float(_require(block, "r", "risk_measure"))
            measure = PowerDistortion(r)
            if severity.k * r <= 1.0:
                raise ConfigError(
                    f"risk_measure: power exponent r={r} with severity shape "
                    f"k={severity.k} gives an infinite risk measure (k*r <= 1)"
                )
            return measure
    except DomainError as exc:
        raise ConfigError(f"risk_measure: {exc}") from exc
    raise ConfigError(f"unknown risk measure kind {kind!r}")


def build_scenario(config: "ScenarioConfig") -> Scenario:
    severity = build_severity(config.severity)
    prevention = build_prevention(config.prevention, config.cost)
    premium = build_premium(config.premium)
    measure = build_measure(config.risk_measure, severity)
    return Scenario(
        mixture=MixtureLoss(prevention=prevention, severity=severity),
        premium=premium,
        measure=measure,
    )


def _validate_sweep(sweep: SweepSpec, config: ScenarioConfig) -> None:
    if sweep.parameter not in PARAM_PATHS:
        raise ConfigError(
            f"sweep parameter {sweep.parameter!r} not in {sorted(PARAM_PATHS)}"
        )
    if sweep.steps < 2:
        raise ConfigError(f"sweep.steps must be at least 2, got {sweep.steps}")
    block_name, key = PARAM_PATHS[sweep.parameter]
    block = getattr(config, block_name)
    if key not in block:
        raise ConfigError(
            f"sweep parameter {sweep.parameter!r} does not exist in the "
            f"configured {block_name} family"
        )
    if not (float("-inf") < sweep.start < float("inf")) or not (
        float("-inf") < sweep.stop < float("inf")
    ):
        raise ConfigError("sweep endpoints must be finite")


def from_dict(raw: dict[str, Any], validate: bool = True) -> ScenarioConfig:
    """Build and validate a config from parsed JSON."""
    if not isinstance(raw, dict):
        raise ConfigError("scenario file must contain a JSON object")
    _warn_unknown("", raw)
    for name in ("severity", "prevention", "cost", "premium", "risk_measure"):
        block = raw.get(name)
        if not isinstance(block, dict):
            raise ConfigError(f"missing or malformed {name!r} block")
        _warn_unknown(name, block)

    mode = raw.get("mode", "solve")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")

    solver_block = raw.get("solver", {})
    if not isinstance(solver_block, dict):
        raise ConfigError("solver block must be an object")
    _warn_unknown("solver", solver_block)
    known = {f.name for f in dataclasses.fields(SolverOptions)}
    solver = SolverOptions(**{k: v for k, v in solver_block.items() if k in known})

    sweep = None
    if "sweep" in raw:
        block = raw["sweep"]
        if not isinstance(block, dict):
            raise ConfigError("sweep block must be an object")
        _warn_unknown("sweep", block)
        sweep = SweepSpec(
            parameter=str(_require(block, "parameter", "sweep")),
            start=float(_require(block, "from", "sweep")),
            stop=float(_require(block, "to", "sweep")),
            steps=int(_require(block, "steps", "sweep")),
        )

    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"seed must be a non-negative integer, got {seed!r}")

    config = ScenarioConfig(
        severity=dict(raw["severity"]),
        prevention=dict(raw["prevention"]),
        cost=dict(raw["cost"]),
        premium=dict(raw["premium"]),
        risk_measure=dict(raw["risk_measure"]),
        mode=mode,
        seed=seed,
        solver=solver,
        sweep=sweep,
    )
    if mode == "sweep" and sweep is None:
        raise ConfigError("mode 'sweep' requires a sweep block")
    if sweep is not None:
        _validate_sweep(sweep, config)
    if not validate:
        return config

    scenario = build_scenario(config)
    reports = list(validate_prevention(scenario.mixture.prevention))
    hard = [r for r in reports if not r.passed]
    if hard:
        msgs = "; ".join(f"{r.name}: {', '.join(r.errors)}" for r in hard)
        raise ConfigError(f"shape validation failed: {msgs}")
    for r in reports:
        for msg in r.warnings:
            warnings.warn(f"{r.name}: {msg}", ConfigWarning, stacklevel=2)

    from .moral import admissible_segments  # deferred: moral imports outer
    from .outer import check_risk_convexity_in_effort, check_tail_mass_convexity

    if isinstance(scenario.measure, TVaRMeasure):
        reports.append(
            AssumptionReport(
                "tail_mass_convexity", check_tail_mass_convexity(scenario)
            )
        )
    else:
        reports.append(
            AssumptionReport(
                "risk_convexity_in_effort", check_risk_convexity_in_effort(scenario)
            )
        )
    if mode == "moral_hazard":
        rp0 = scenario.measure.rho_prime(scenario.mixture, 0.0)
        if isinstance(rp0, tuple):
            rp0 = rp0[1]
        reports.append(
            AssumptionReport(
                "risk_derivative_profile",
                rp0 < 0.0,
                errors=[] if rp0 < 0.0 else ["risk measure must strictly decrease in effort at 0"],
            )
        )
    return dataclasses.replace(config, reports=tuple(reports))


def loads(text: str, validate: bool = True) -> ScenarioConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"scenario file is not valid JSON: {exc.msg} at line {exc.lineno}, "
            f"column {exc.colno}"
        ) from exc
    schema_check(raw)
    return from_dict(raw, validate=validate)


def load(path: str | Path, validate: bool = True) -> ScenarioConfig:
    """Parse, schema-check, and validate a scenario file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"scenario file not found: {path}")
    return loads(path.read_text(), validate=validate)


def _schema_path() -> Path:
    return Path(__file__).resolve().parents[2] / "schema" / "scenario.json"


def schema_check(raw: dict) -> None:
    """Validate raw JSON against the published schema, if available."""
    try:
        import jsonschema
    except ImportError:  # pragma: no cover
        return
    schema_file = _schema_path()
    if not schema_file.exists():  # pragma: no cover
        return
    schema = json.loads(schema_file.read_text())
    try:
        jsonschema.validate(raw, schema)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"schema violation at {path}: {exc.message}") from None


def set_parameter(config: ScenarioConfig, name: str, value: float) -> ScenarioConfig:
    """Config with one swept/overridable scalar replaced."""
    if name not in PARAM_PATHS:
        raise ConfigError(f"unknown parameter {name!r}")
    block_name, key = PARAM_PATHS[name]
    block = dict(getattr(config, block_name))
    if key not in block:
        raise ConfigError(
            f"parameter {name!r} does not exist in the configured {block_name} family"
        )
    block[key] = value
    return dataclasses.replace(config, **{block_name: block})


def materialize(config: ScenarioConfig, sweep_index: int) -> tuple[float, Scenario]:
    """Scenario at one sweep grid point; derived quantities regenerate."""
    if config.sweep is None:
        raise ConfigError("config has no sweep block")
    value = config.sweep.value(sweep_index)
    replaced = set_parameter(config, config.sweep.parameter, value)
    try:
        return value, build_scenario(replaced)
    except (DomainError, InfiniteRiskError) as exc:
        raise ConfigError(
            f"sweep point {config.sweep.parameter}={value} is invalid: {exc}"
        ) from exc


def apply_override(raw: dict[str, Any], key: str, value: Any) -> None:
    """Apply one --set override onto a raw config dict, in place.

    Bare names resolve through the sweep-parameter map; dotted paths address
    any block field directly.
    """
    if "." in key:
        parts = key.split(".")
        target = raw
        for part in parts[:-1]:
            if part not in target or not isinstance(target[part], dict):
                target[part] = {}
            target = target[part]
        target[parts[-1]] = value
        return
    if key in PARAM_PATHS:
        block_name, field_name = PARAM_PATHS[key]
        raw.setdefault(block_name, {})[field_name] = value
        return
    if key in _KNOWN_KEYS[""]:
        raw[key] = value
        return
    raise ConfigError(f"unknown override key {key!r}")
