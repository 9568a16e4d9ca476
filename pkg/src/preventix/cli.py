"""Command-line front end.

    preventix <solve|sweep|moral-hazard|oracle-check> --config PATH
              [--out DIR] [--set K=V]... [--seed N] [--samples N]

Exit codes: 0 success, 1 configuration/validation error, 2 solver
diagnostic failure. Sweeps run in a thread pool capped by
PREVENTIX_THREADS; rows are always emitted in sweep order. Identical
config and seed produce byte-identical CSV/JSON/SVG outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any

from . import config as config_mod
from . import moral, oracle, outer, partition
from .errors import ConfigError, PreventixError, SolverDiagnosticError
from .plot import write_line_plot

CSV_COLUMNS = (
    "value",
    "e_star",
    "alpha_star",
    "objective",
    "case_label",
    "e_G1",
    "e_G2",
    "e_beta",
    "e_B",
    "corner_taken",
)


def _workers() -> int:
    env = os.environ.get("PREVENTIX_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"PREVENTIX_THREADS must be an integer, got {env!r}")
    return min(8, os.cpu_count() or 1)


def _fmt_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(rows: list[dict[str, Any]], path: Path) -> None:
    """Fixed-header CSV; columns missing from a mode stay empty, never drop."""
    if not rows:
        raise ConfigError("no rows to emit")
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(_fmt_cell(row.get(col)) for col in CSV_COLUMNS))
    path.write_text("\n".join(lines) + "\n")


def emit_json(payload: dict[str, Any], path: Path) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _solve_row(value: float | None, result: outer.SolveResult) -> dict[str, Any]:
    return {
        "value": value,
        "e_star": result.e_star,
        "alpha_star": result.alpha_star,
        "objective": result.objective,
        "case_label": result.case_label,
        "e_G1": result.thresholds.get("e_G1"),
        "e_G2": result.thresholds.get("e_G2"),
        "e_beta": result.thresholds.get("e_beta"),
        "e_B": None,
        "corner_taken": None,
    }


def _moral_row(value: float | None, result: moral.MoralHazardResult) -> dict[str, Any]:
    return {
        "value": value,
        "e_star": result.e_star,
        "alpha_star": result.alpha_star,
        "objective": result.objective,
        "case_label": None,
        "e_G1": None,
        "e_G2": None,
        "e_beta": None,
        "e_B": result.e_bound,
        "corner_taken": result.corner_taken,
    }


def _write_outputs(
    out: Path,
    payload: dict[str, Any],
    rows: list[dict[str, Any]],
    sweep_param: str | None,
    markers: dict[str, float],
) -> None:
    out.mkdir(parents=True, exist_ok=True)
    emit_csv(rows, out / "results.csv")
    emit_json(payload, out / "results.json")
    if sweep_param is not None and len(rows) > 1:
        xs = [row["value"] for row in rows]
        for column in ("e_star", "alpha_star"):
            write_line_plot(
                out / f"{column}.svg",
                xs,
                [row[column] for row in rows],
                xlabel=sweep_param,
                ylabel=column,
                markers=markers,
            )


def _load_config(
    args: argparse.Namespace,
) -> tuple[config_mod.ScenarioConfig, dict[str, Any]]:
    path = Path(args.config)
    if not path.exists():
        raise ConfigError(f"scenario file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"scenario file is not valid JSON: {exc.msg} at line {exc.lineno}, "
            f"column {exc.colno}"
        ) from exc
    config_mod.schema_check(raw)
    overrides: dict[str, Any] = {}
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, text = item.split("=", 1)
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            value = text
        config_mod.apply_override(raw, key.strip(), value)
        overrides[key.strip()] = value
    if args.seed is not None:
        raw["seed"] = args.seed
        overrides["seed"] = args.seed
    return config_mod.from_dict(raw), overrides


def _run_solve(args: argparse.Namespace) -> int:
    config, overrides = _load_config(args)
    scenario = config_mod.build_scenario(config)
    result = outer.solve(scenario, config.solver)
    payload = {
        "mode": "solve",
        "config": config.to_dict(),
        "overrides": overrides,
        "result": result.as_dict(),
    }
    print(json.dumps(payload["result"], indent=2, sort_keys=True))
    if args.out:
        _write_outputs(Path(args.out), payload, [_solve_row(None, result)], None, {})
    return 0


def _run_sweep(args: argparse.Namespace) -> int:
    config, overrides = _load_config(args)
    if config.sweep is None:
        raise ConfigError("sweep mode requires a sweep block in the scenario file")
    if not args.out:
        raise ConfigError("sweep mode requires --out")
    indices = range(config.sweep.steps)

    def solve_point(i: int) -> dict[str, Any]:
        value, scenario = config_mod.materialize(config, i)
        result = outer.solve(scenario, config.solver)
        return _solve_row(value, result)

    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        rows = list(pool.map(solve_point, indices))
    markers = partition.partition_thresholds(config)
    payload = {
        "mode": "sweep",
        "config": config.to_dict(),
        "overrides": overrides,
        "thresholds": markers,
        "rows": rows,
    }
    _write_outputs(Path(args.out), payload, rows, config.sweep.parameter, markers)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _run_moral_hazard(args: argparse.Namespace) -> int:
    config, overrides = _load_config(args)
    if config.sweep is not None:
        if not args.out:
            raise ConfigError("moral-hazard sweeps require --out")

        def solve_point(i: int) -> dict[str, Any]:
            value, scenario = config_mod.materialize(config, i)
            result = moral.solve_moral_hazard(scenario, config.solver)
            return _moral_row(value, result)

        with ThreadPoolExecutor(max_workers=_workers()) as pool:
            rows = list(pool.map(solve_point, range(config.sweep.steps)))
        markers = partition.partition_thresholds(config)
        payload = {
            "mode": "moral_hazard",
            "config": config.to_dict(),
            "overrides": overrides,
            "thresholds": markers,
            "rows": rows,
        }
        _write_outputs(Path(args.out), payload, rows, config.sweep.parameter, markers)
        print(f"wrote {len(rows)} rows to {args.out}")
        return 0
    scenario = config_mod.build_scenario(config)
    result = moral.solve_moral_hazard(scenario, config.solver)
    payload = {
        "mode": "moral_hazard",
        "config": config.to_dict(),
        "overrides": overrides,
        "result": result.as_dict(),
    }
    print(json.dumps(payload["result"], indent=2, sort_keys=True))
    if args.out:
        _write_outputs(Path(args.out), payload, [_moral_row(None, result)], None, {})
    return 0


def _run_oracle_check(args: argparse.Namespace) -> int:
    config, overrides = _load_config(args)
    scenario = config_mod.build_scenario(config)
    samples = args.samples or 1_000_000
    seed = config.seed
    reports = oracle.mc_estimate(scenario, e=0.0, alpha=1.0, n=samples, seed=seed)
    result = outer.solve(scenario, config.solver)
    grid = oracle.grid_search(scenario)
    grid_ok = oracle.compare_with_solver(scenario, result, grid)
    payload = {
        "mode": "oracle_check",
        "config": config.to_dict(),
        "overrides": overrides,
        "samples": samples,
        "seed": seed,
        "mc": {name: rep.as_dict() for name, rep in sorted(reports.items())},
        "grid_vs_solve": {
            "solver_objective": result.objective,
            "grid_objective": grid.value,
            "agrees": grid_ok,
        },
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        emit_json(payload, out / "results.json")
    all_ok = grid_ok and all(rep.agrees for rep in reports.values())
    if not all_ok:
        raise SolverDiagnosticError("oracle disagreement; see report")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="preventix",
        description="Optimal coinsurance share and prevention effort solver",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func in (
        ("solve", _run_solve),
        ("sweep", _run_sweep),
        ("moral-hazard", _run_moral_hazard),
        ("oracle-check", _run_oracle_check),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="scenario JSON file")
        p.add_argument("--out", help="output directory")
        p.add_argument(
            "--set",
            action="append",
            metavar="K=V",
            help="override a scalar config field (bare name or dotted path)",
        )
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--samples", type=int, help="Monte-Carlo sample count")
        p.set_defaults(func=func)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SolverDiagnosticError as exc:
        print(f"solver diagnostic: {exc}", file=sys.stderr)
        return 2
    except PreventixError as exc:
        print(f"solver diagnostic: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:  # console entry point
    sys.exit(run())


if __name__ == "__main__":
    main()
