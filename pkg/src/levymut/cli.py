"""Command-line interface: scenario in, reports and CSV files out.

Exit codes: 0 all checks passed, 1 at least one check failed, 2 input or
I/O error.  All randomness is controlled by the scenario's base seed (or
--seed), so identical invocations produce byte-identical outputs regardless
of the worker-thread count.

Every run flag can also be supplied through the environment with the
LEVYMUT_ prefix (LEVYMUT_SCENARIO, LEVYMUT_SEED, LEVYMUT_DT,
LEVYMUT_HORIZON, LEVYMUT_PATHS, LEVYMUT_THREADS, LEVYMUT_OUT_DIR,
LEVYMUT_FORMAT); explicit flags win over the environment, which wins over
the scenario file.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from .analysis import classify_regime
from .bounds import bound_processes
from .ensemble import run_ensemble
from .levy import path_streams
from .report import (
    base_report,
    regime_to_dict,
    write_convergence_csv,
    write_path_csv,
    write_summary_csv,
)
from .scenario import Scenario, ScenarioError, load_scenario
from .sim import simulate_path
from .verify import run_verification

ENV_PREFIX = "LEVYMUT_"


def _env(name):
    return os.environ.get(ENV_PREFIX + name)


def _resolve(flag_value, env_name, cast):
    if flag_value is not None:
        return flag_value
    raw = _env(env_name)
    if raw is None:
        return None
    try:
        return cast(raw)
    except ValueError:
        raise ScenarioError(f"environment {ENV_PREFIX}{env_name}: bad value {raw!r}")


def _add_common(parser):
    parser.add_argument("--scenario", help="scenario TOML file")
    parser.add_argument("--seed", type=int, help="override run.base_seed")
    parser.add_argument("--dt", type=float, help="override run.dt")
    parser.add_argument("--horizon", type=float, help="override run.horizon")
    parser.add_argument("--paths", type=int, help="override run.n_paths")
    parser.add_argument("--threads", type=int, help="override run.threads")
    parser.add_argument("--out-dir", help="output directory (default: .)")
    parser.add_argument(
        "--format",
        choices=("csv", "json", "both"),
        help="which artifacts to write (default: both)",
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="levymut",
        description="Simulate and verify the jump-driven two-species mutualism model",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("simulate", "integrate one path and write it as CSV"),
        ("ensemble", "run an ensemble and write summary plus per-path CSVs"),
        ("verify", "run every enabled check and report pass/fail"),
        ("classify", "print the theoretical regime verdict (no simulation)"),
        ("convergence", "run the dt-halving self-convergence study"),
    ):
        _add_common(sub.add_parser(name, help=text))
    return parser


def _load(args) -> Scenario:
    path = _resolve(args.scenario, "SCENARIO", str)
    if path is None:
        raise ScenarioError("a scenario file is required (--scenario or "
                            f"{ENV_PREFIX}SCENARIO)")
    scenario = load_scenario(path)
    overrides = {}
    seed = _resolve(args.seed, "SEED", int)
    if seed is not None:
        overrides["base_seed"] = seed
    dt = _resolve(args.dt, "DT", float)
    if dt is not None:
        overrides["dt"] = dt
    horizon = _resolve(args.horizon, "HORIZON", float)
    if horizon is not None:
        overrides["horizon"] = horizon
    paths = _resolve(args.paths, "PATHS", int)
    if paths is not None:
        overrides["n_paths"] = paths
    threads = _resolve(args.threads, "THREADS", int)
    if threads is not None:
        overrides["threads"] = threads
    if overrides:
        scenario = dataclasses.replace(scenario, **overrides)
    return scenario


def _out_dir(args) -> Path:
    out = Path(_resolve(args.out_dir, "OUT_DIR", str) or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _format(args) -> str:
    return _resolve(args.format, "FORMAT", str) or "both"


def _write_report(out, report, fmt):
    if fmt in ("json", "both"):
        (out / "report.json").write_text(report.to_json(), encoding="utf-8")
        report_name = "report.json"
        print(f"wrote {out / report_name}")


def _emit_path_files(out, ensemble, report, fmt):
    if fmt not in ("csv", "both"):
        return
    rows = ensemble.rows
    have_bounds = rows is not None and "upper_x" in rows
    for j in range(ensemble.n_paths):
        name = f"path_{j:03d}.csv"
        bounds = None
        if have_bounds:
            bounds = (
                rows["upper_x"][j],
                rows["lower_x"][j],
                rows["upper_y"][j],
                rows["lower_y"][j],
            )
        write_path_csv(
            out / name,
            ensemble.report_times,
            ensemble.x_report[j],
            ensemble.y_report[j],
            rows["u"][j],
            rows["v"][j],
            rows["M1"][j],
            rows["M2"][j],
            rows["Q1"][j],
            rows["Q2"][j],
            bounds=bounds,
        )
        report.path_files.append(name)


def _emit_summary(out, scenario, ensemble, report, fmt):
    if fmt in ("csv", "both"):
        write_summary_csv(out / "summary.csv", ensemble, scenario.checks.moments)
        report.artifacts.append("summary.csv")
        print(f"wrote {out / 'summary.csv'}")


def _cmd_simulate(args) -> int:
    scenario = _load(args)
    out = _out_dir(args)
    fmt = _format(args)
    streams = path_streams(scenario.base_seed, 0)
    path = simulate_path(scenario.model, scenario.dt, scenario.horizon, streams)
    bounds = None
    if scenario.checks.sandwich is not None:
        b = bound_processes(scenario.model, path)
        bounds = (b.upper_x, b.lower_x, b.upper_y, b.lower_y)
    report = base_report(scenario, classify_regime(scenario.model, scenario.horizon))
    if fmt in ("csv", "both"):
        write_path_csv(
            out / "path.csv",
            path.grid, path.x, path.y, path.u, path.v,
            path.M1, path.M2, path.Q1, path.Q2,
            bounds=bounds,
        )
        report.path_files.append("path.csv")
        print(f"wrote {out / 'path.csv'}")
    _write_report(out, report, fmt)
    return 0


def _cmd_ensemble(args) -> int:
    scenario = _load(args)
    out = _out_dir(args)
    fmt = _format(args)
    rel_tol = (
        scenario.checks.sandwich.rel_tol
        if scenario.checks.sandwich is not None
        else None
    )
    ensemble = run_ensemble(
        scenario.model,
        scenario.dt,
        scenario.horizon,
        scenario.n_paths,
        scenario.base_seed,
        threads=scenario.threads,
        report_points=scenario.report_points,
        sandwich_rel_tol=rel_tol,
        collect_rows=True,
    )
    report = base_report(scenario, classify_regime(scenario.model, scenario.horizon))
    _emit_summary(out, scenario, ensemble, report, fmt)
    _emit_path_files(out, ensemble, report, fmt)
    _write_report(out, report, fmt)
    print(f"simulated {ensemble.n_paths} paths ({ensemble.n_paths - ensemble.n_valid} aborted)")
    return 0


def _cmd_verify(args) -> int:
    scenario = _load(args)
    out = _out_dir(args)
    fmt = _format(args)
    outcome = run_verification(scenario, collect_rows=fmt in ("csv", "both"))
    report = outcome.report
    if outcome.ensemble is not None:
        _emit_summary(out, scenario, outcome.ensemble, report, fmt)
        _emit_path_files(out, outcome.ensemble, report, fmt)
    if outcome.study is not None and fmt in ("csv", "both"):
        write_convergence_csv(out / "convergence.csv", outcome.study)
        report.artifacts.append("convergence.csv")
        print(f"wrote {out / 'convergence.csv'}")
    _write_report(out, report, fmt)
    for check in report.checks:
        tag = "PASS" if check["passed"] else "FAIL"
        note = "" if check["applicable"] else " (not applicable)"
        print(f"[{tag}] {check['name']}{note}")
    print(f"VERDICT: {'PASS' if report.passed else 'FAIL'}")
    return 0 if report.passed else 1


def _cmd_classify(args) -> int:
    scenario = _load(args)
    verdict = classify_regime(scenario.model, scenario.horizon)
    print(json.dumps(regime_to_dict(verdict), sort_keys=True, indent=2))
    print(f"case {verdict.joint.value}")
    return 0


def _cmd_convergence(args) -> int:
    scenario = _load(args)
    if scenario.checks.convergence is None:
        raise ScenarioError("scenario has no checks.convergence section")
    out = _out_dir(args)
    fmt = _format(args)
    from .convergence import convergence_study

    check = scenario.checks.convergence
    n_paths = check.n_paths if check.n_paths is not None else scenario.n_paths
    study = convergence_study(
        scenario.model,
        check.dt_levels,
        scenario.horizon,
        n_paths,
        scenario.base_seed,
        threads=scenario.threads,
    )
    if fmt in ("csv", "both"):
        write_convergence_csv(out / "convergence.csv", study)
        print(f"wrote {out / 'convergence.csv'}")
    print("dt levels:", ", ".join(f"{d:g}" for d in study.dt_levels))
    print("direct-scheme successive RMS:", study.direct_rms)
    print("direct-scheme ratios:", study.direct_ratios)
    print("log-scheme successive RMS:", study.log_rms)
    print("cross-scheme RMS per level:", study.cross_rms)
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "ensemble": _cmd_ensemble,
    "verify": _cmd_verify,
    "classify": _cmd_classify,
    "convergence": _cmd_convergence,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ScenarioError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
