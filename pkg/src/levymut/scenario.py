"""Scenario files: the hand-editable TOML surface of the toolkit.

A scenario bundles the model parameters, the run settings, and the list of
enabled verifications.  Every invariant is checked at load time so a bad
file fails with the offending key path before any simulation starts.  The
exact grammar is documented in the README and scenarios round-trip through
``scenario_to_toml``/``load_scenario`` to an equivalent object.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

try:
    import tomllib as _toml
except ImportError:  # Python < 3.11
    import tomli as _toml

from .coeffs import Coefficient, Constant, Mark, MarkTable, Sinusoid, Table
from .sim import ModelSpec


class ScenarioError(ValueError):
    """A scenario file failed to parse or violated an invariant."""


@dataclass(frozen=True)
class SandwichCheck:
    rel_tol: float = 1e-2

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ScenarioError("checks.sandwich.rel_tol must be positive")


@dataclass(frozen=True)
class PermanenceCheck:
    epsilon: float = 0.1

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ScenarioError("checks.permanence.epsilon must be in (0, 1)")


@dataclass(frozen=True)
class ConvergenceCheck:
    dt_levels: tuple
    n_paths: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "dt_levels", tuple(float(d) for d in self.dt_levels))
        if len(self.dt_levels) < 2:
            raise ScenarioError("checks.convergence.dt_levels needs >= 2 levels")
        if any(d <= 0 for d in self.dt_levels):
            raise ScenarioError("checks.convergence.dt_levels must be positive")
        if self.n_paths is not None and self.n_paths < 2:
            raise ScenarioError("checks.convergence.n_paths must be >= 2")


@dataclass(frozen=True)
class Checks:
    regime: bool = False
    sandwich: SandwichCheck | None = None
    persistence: bool = False
    extinction: bool = False
    moments: tuple = ()
    permanence: PermanenceCheck | None = None
    convergence: ConvergenceCheck | None = None

    def __post_init__(self):
        object.__setattr__(self, "moments", tuple(float(q) for q in self.moments))
        if any(q <= 0 for q in self.moments):
            raise ScenarioError("checks.moments entries must be positive")

    def enabled(self):
        names = []
        if self.regime:
            names.append("regime")
        if self.sandwich is not None:
            names.append("sandwich")
        if self.persistence:
            names.append("persistence")
        if self.extinction:
            names.append("extinction")
        if self.moments:
            names.append("moments")
        if self.permanence is not None:
            names.append("permanence")
        if self.convergence is not None:
            names.append("convergence")
        return names


@dataclass(frozen=True)
class Scenario:
    model: ModelSpec
    dt: float = 1e-3
    horizon: float = 100.0
    n_paths: int = 100
    base_seed: int = 0
    threads: int = 1
    report_points: int = 401
    checks: Checks = field(default_factory=Checks)

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ScenarioError("run.dt must be positive")
        if not (self.horizon > self.dt):
            raise ScenarioError("run.horizon must exceed run.dt")
        if self.n_paths < 1:
            raise ScenarioError("run.n_paths must be >= 1")
        if self.threads < 1:
            raise ScenarioError("run.threads must be >= 1")
        if self.report_points < 2:
            raise ScenarioError("run.report_points must be >= 2")
        if self.checks.permanence is not None and self.n_paths < 100:
            raise ScenarioError(
                "checks.permanence requires run.n_paths >= 100 for a usable "
                "quantile band"
            )
        if self.checks.convergence is not None:
            from .convergence import validate_levels

            try:
                validate_levels(self.checks.convergence.dt_levels, self.horizon)
            except ValueError as err:
                raise ScenarioError(f"checks.convergence: {err}") from None


_MODEL_COEFFS = ("r1", "b1", "K1", "eps1", "r2", "b2", "K2", "eps2")
_MODEL_OPTIONAL = ("alpha1", "alpha2")


def _require_number(obj, where):
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ScenarioError(f"{where}: expected a number")
    return float(obj)


def _coefficient_from(obj, where) -> Coefficient:
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return Constant(float(obj))
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: expected a number or a coefficient table")
    kind = obj.get("kind")
    try:
        if kind == "constant":
            _check_keys(obj, {"kind", "value"}, where)
            return Constant(_require_number(obj["value"], f"{where}.value"))
        if kind == "sinusoid":
            _check_keys(
                obj, {"kind", "mean", "amplitude", "angular_frequency", "phase"}, where
            )
            return Sinusoid(
                mean=_require_number(obj["mean"], f"{where}.mean"),
                amplitude=_require_number(obj["amplitude"], f"{where}.amplitude"),
                angular_frequency=_require_number(
                    obj["angular_frequency"], f"{where}.angular_frequency"
                ),
                phase=_require_number(obj.get("phase", 0.0), f"{where}.phase"),
            )
        if kind == "table":
            _check_keys(obj, {"kind", "knots", "values"}, where)
            return Table(knots=tuple(obj["knots"]), values=tuple(obj["values"]))
    except KeyError as missing:
        raise ScenarioError(f"{where}: missing field {missing}") from None
    except (TypeError, ValueError) as err:
        raise ScenarioError(f"{where}: {err}") from None
    raise ScenarioError(
        f"{where}.kind must be one of 'constant', 'sinusoid', 'table'"
    )


def _check_keys(obj, allowed, where):
    unknown = set(obj) - set(allowed)
    if unknown:
        raise ScenarioError(f"{where}: unknown key(s) {sorted(unknown)}")


def _model_from(data) -> ModelSpec:
    if not isinstance(data, dict):
        raise ScenarioError("model: expected a table")
    allowed = set(_MODEL_COEFFS) | set(_MODEL_OPTIONAL) | {"x0", "y0", "marks"}
    _check_keys(data, allowed, "model")
    kwargs = {}
    for name in _MODEL_COEFFS:
        if name not in data:
            raise ScenarioError(f"model.{name} is required")
        kwargs[name] = _coefficient_from(data[name], f"model.{name}")
    for name in _MODEL_OPTIONAL:
        if name in data:
            kwargs[name] = _coefficient_from(data[name], f"model.{name}")
    marks = []
    for i, entry in enumerate(data.get("marks", [])):
        where = f"model.marks[{i}]"
        if not isinstance(entry, dict):
            raise ScenarioError(f"{where}: expected a table")
        _check_keys(entry, {"weight", "gamma1", "gamma2"}, where)
        try:
            marks.append(
                Mark(
                    weight=_require_number(entry["weight"], f"{where}.weight"),
                    gamma1=_coefficient_from(entry["gamma1"], f"{where}.gamma1"),
                    gamma2=_coefficient_from(entry["gamma2"], f"{where}.gamma2"),
                )
            )
        except KeyError as missing:
            raise ScenarioError(f"{where}: missing field {missing}") from None
        except ValueError as err:
            raise ScenarioError(f"{where}: {err}") from None
    for name in ("x0", "y0"):
        if name not in data:
            raise ScenarioError(f"model.{name} is required")
        kwargs[name] = _require_number(data[name], f"model.{name}")
    try:
        return ModelSpec(marks=MarkTable(tuple(marks)), **kwargs)
    except (TypeError, ValueError) as err:
        raise ScenarioError(f"model: {err}") from None


def _checks_from(data) -> Checks:
    if data is None:
        return Checks()
    if not isinstance(data, dict):
        raise ScenarioError("checks: expected a table")
    allowed = {
        "regime",
        "sandwich",
        "persistence",
        "extinction",
        "moments",
        "permanence",
        "convergence",
    }
    _check_keys(data, allowed, "checks")

    def flag(name):
        v = data.get(name, False)
        if not isinstance(v, bool):
            raise ScenarioError(f"checks.{name}: expected a boolean")
        return v

    sandwich = None
    if "sandwich" in data:
        v = data["sandwich"]
        if v is True:
            sandwich = SandwichCheck()
        elif isinstance(v, dict):
            _check_keys(v, {"rel_tol"}, "checks.sandwich")
            sandwich = SandwichCheck(
                rel_tol=_require_number(v.get("rel_tol", 1e-2), "checks.sandwich.rel_tol")
            )
        elif v is not False:
            raise ScenarioError("checks.sandwich: expected a boolean or a table")

    permanence = None
    if "permanence" in data:
        v = data["permanence"]
        if v is True:
            permanence = PermanenceCheck()
        elif isinstance(v, dict):
            _check_keys(v, {"epsilon"}, "checks.permanence")
            permanence = PermanenceCheck(
                epsilon=_require_number(
                    v.get("epsilon", 0.1), "checks.permanence.epsilon"
                )
            )
        elif v is not False:
            raise ScenarioError("checks.permanence: expected a boolean or a table")

    convergence = None
    if "convergence" in data:
        v = data["convergence"]
        if not isinstance(v, dict) or "dt_levels" not in v:
            raise ScenarioError("checks.convergence: expected a table with dt_levels")
        _check_keys(v, {"dt_levels", "n_paths"}, "checks.convergence")
        n = v.get("n_paths")
        if n is not None and (isinstance(n, bool) or not isinstance(n, int)):
            raise ScenarioError("checks.convergence.n_paths: expected an integer")
        convergence = ConvergenceCheck(dt_levels=tuple(v["dt_levels"]), n_paths=n)

    moments = data.get("moments", ())
    if not isinstance(moments, (list, tuple)):
        raise ScenarioError("checks.moments: expected a list of exponents")

    return Checks(
        regime=flag("regime"),
        sandwich=sandwich,
        persistence=flag("persistence"),
        extinction=flag("extinction"),
        moments=tuple(_require_number(q, "checks.moments[]") for q in moments),
        permanence=permanence,
        convergence=convergence,
    )


def scenario_from_dict(data) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario: expected a table at top level")
    _check_keys(data, {"model", "run", "checks"}, "scenario")
    if "model" not in data:
        raise ScenarioError("model section is required")
    model = _model_from(data["model"])
    run = data.get("run", {})
    if not isinstance(run, dict):
        raise ScenarioError("run: expected a table")
    _check_keys(
        run,
        {"dt", "horizon", "n_paths", "base_seed", "threads", "report_points"},
        "run",
    )

    def run_int(name, default):
        v = run.get(name, default)
        if isinstance(v, bool) or not isinstance(v, int):
            raise ScenarioError(f"run.{name}: expected an integer")
        return v

    return Scenario(
        model=model,
        dt=_require_number(run.get("dt", 1e-3), "run.dt"),
        horizon=_require_number(run.get("horizon", 100.0), "run.horizon"),
        n_paths=run_int("n_paths", 100),
        base_seed=run_int("base_seed", 0),
        threads=run_int("threads", 1),
        report_points=run_int("report_points", 401),
        checks=_checks_from(data.get("checks")),
    )


def load_scenario(path) -> Scenario:
    """Parse and validate a scenario file; raises ScenarioError on any defect."""
    try:
        with open(path, "rb") as fh:
            data = _toml.load(fh)
    except FileNotFoundError:
        raise ScenarioError(f"scenario file not found: {path}") from None
    except _toml.TOMLDecodeError as err:
        raise ScenarioError(f"{path}: {err}") from None
    return scenario_from_dict(data)


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt_value(x) for x in v) + "]"
    if isinstance(v, dict):
        inner = ", ".join(f"{k} = {_fmt_value(x)}" for k, x in v.items())
        return "{ " + inner + " }"
    raise TypeError(f"cannot serialize {type(v)!r}")


def _coefficient_to(c: Coefficient):
    if isinstance(c, Constant):
        return c.value
    if isinstance(c, Sinusoid):
        return {
            "kind": "sinusoid",
            "mean": c.mean,
            "amplitude": c.amplitude,
            "angular_frequency": c.angular_frequency,
            "phase": c.phase,
        }
    if isinstance(c, Table):
        return {"kind": "table", "knots": list(c.knots), "values": list(c.values)}
    raise TypeError(f"cannot serialize coefficient {type(c)!r}")


def scenario_to_dict(s: Scenario, include_execution=True) -> dict:
    """Plain-data form of a scenario (also the JSON report's echo).

    ``include_execution=False`` drops the worker-thread count, which affects
    scheduling but never the results; reports must stay byte-identical
    across thread counts.
    """
    model = {"x0": s.model.x0, "y0": s.model.y0}
    for name in _MODEL_COEFFS + _MODEL_OPTIONAL:
        model[name] = _coefficient_to(getattr(s.model, name))
    if s.model.marks.n_marks:
        model["marks"] = [
            {
                "weight": m.weight,
                "gamma1": _coefficient_to(m.gamma1),
                "gamma2": _coefficient_to(m.gamma2),
            }
            for m in s.model.marks.marks
        ]
    checks = {}
    c = s.checks
    if c.regime:
        checks["regime"] = True
    if c.sandwich is not None:
        checks["sandwich"] = {"rel_tol": c.sandwich.rel_tol}
    if c.persistence:
        checks["persistence"] = True
    if c.extinction:
        checks["extinction"] = True
    if c.moments:
        checks["moments"] = list(c.moments)
    if c.permanence is not None:
        checks["permanence"] = {"epsilon": c.permanence.epsilon}
    if c.convergence is not None:
        conv = {"dt_levels": list(c.convergence.dt_levels)}
        if c.convergence.n_paths is not None:
            conv["n_paths"] = c.convergence.n_paths
        checks["convergence"] = conv
    run = {
        "dt": s.dt,
        "horizon": s.horizon,
        "n_paths": s.n_paths,
        "base_seed": s.base_seed,
        "report_points": s.report_points,
    }
    if include_execution:
        run["threads"] = s.threads
    return {"model": model, "run": run, "checks": checks}


def scenario_to_toml(s: Scenario) -> str:
    """Serialize a scenario; re-loading yields an equivalent Scenario."""
    data = scenario_to_dict(s)
    lines = []

    model = data["model"]
    marks = model.pop("marks", None)
    scalar = {k: v for k, v in model.items() if not isinstance(v, dict)}
    nested = {k: v for k, v in model.items() if isinstance(v, dict)}
    lines.append("[model]")
    for k, v in scalar.items():
        lines.append(f"{k} = {_fmt_value(v)}")
    for k, v in nested.items():
        lines.append("")
        lines.append(f"[model.{k}]")
        for kk, vv in v.items():
            lines.append(f"{kk} = {_fmt_value(vv)}")
    if marks:
        for mark in marks:
            lines.append("")
            lines.append("[[model.marks]]")
            for kk, vv in mark.items():
                lines.append(f"{kk} = {_fmt_value(vv)}")

    lines.append("")
    lines.append("[run]")
    for k, v in data["run"].items():
        lines.append(f"{k} = {_fmt_value(v)}")

    if data["checks"]:
        lines.append("")
        lines.append("[checks]")
        for k, v in data["checks"].items():
            lines.append(f"{k} = {_fmt_value(v)}")
    return "\n".join(lines) + "\n"


def save_scenario(s: Scenario, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(scenario_to_toml(s))
