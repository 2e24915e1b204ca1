"""Machine-readable run reports: stable JSON plus plot-ready CSV files.

CSV numbers carry 17 significant digits so doubles round-trip bit-faithfully
through other tools; JSON is emitted with sorted keys so identical runs are
byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import coeffs as cf
from .scenario import Scenario, scenario_to_dict

# Path CSV column contract; the four bound columns are appended when the
# sandwich check is enabled.
PATH_COLUMNS = ("t", "x", "y", "lnx", "lny", "M1", "M2", "Q1", "Q2")
BOUND_COLUMNS = ("Lambda", "lambda", "Theta", "theta")


def fmt(value) -> str:
    """One CSV cell: 17 significant digits."""
    return f"{value:.17g}"


def write_csv(path, columns, arrays):
    """Write named columns of equal length with bit-faithful formatting."""
    arrays = [np.asarray(a) for a in arrays]
    n = arrays[0].size
    if any(a.size != n for a in arrays):
        raise ValueError("CSV columns must have equal length")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for i in range(n):
            fh.write(",".join(fmt(a[i]) for a in arrays) + "\n")


def write_path_csv(path, grid, x, y, u, v, M1, M2, Q1, Q2, bounds=None):
    """One trajectory file following the documented column contract.

    ``bounds`` is either None or the tuple (upper_x, lower_x, upper_y,
    lower_y) aligned to the grid.
    """
    columns = list(PATH_COLUMNS)
    arrays = [grid, x, y, u, v, M1, M2, Q1, Q2]
    if bounds is not None:
        columns += list(BOUND_COLUMNS)
        arrays += list(bounds)
    write_csv(path, columns, arrays)


def write_summary_csv(path, ensemble, moment_qs=()):
    """Cross-path statistics per report time."""
    columns = ["t"]
    arrays = [ensemble.report_times]
    for species, tag in ((1, "x"), (2, "y")):
        columns += [f"{tag}_mean", f"{tag}_q05", f"{tag}_q50", f"{tag}_q95"]
        arrays += [
            ensemble.mean_curve(species),
            ensemble.quantile_curve(species, 0.05),
            ensemble.quantile_curve(species, 0.50),
            ensemble.quantile_curve(species, 0.95),
        ]
    columns += ["xavg_mean", "yavg_mean"]
    arrays += [
        ensemble.time_averages(1).mean(axis=0),
        ensemble.time_averages(2).mean(axis=0),
    ]
    for q in moment_qs:
        for species, tag in ((1, "x"), (2, "y")):
            columns.append(f"{tag}_mq{q:g}")
            arrays.append(ensemble.moment_curve(species, q))
    write_csv(path, columns, arrays)


def write_convergence_csv(path, study):
    """Self-convergence table: one row per dt level.

    The *_rms_to_next columns hold the RMS endpoint difference between this
    level and the next finer one (NaN on the finest row).
    """
    L = len(study.dt_levels)
    pad = lambda a: np.concatenate([a, [np.nan] * (L - a.size)])
    write_csv(
        path,
        ("dt", "cross_scheme_rms", "direct_rms_to_next", "log_rms_to_next"),
        (
            np.array(study.dt_levels),
            study.cross_rms,
            pad(study.direct_rms),
            pad(study.log_rms),
        ),
    )


def _env_dict(env: cf.Envelope) -> dict:
    return {"inf": env.inf, "sup": env.sup}


def resolve_envelopes(scenario: Scenario) -> dict:
    """Every coefficient's envelope plus the per-species noise penalty."""
    model = scenario.model
    horizon = scenario.horizon
    out = {}
    for name in ("r1", "b1", "K1", "eps1", "alpha1", "r2", "b2", "K2", "eps2",
                 "alpha2"):
        out[name] = _env_dict(getattr(model, name).envelope(horizon))
    for species in (1, 2):
        alpha = model.species(species)[4]
        out[f"beta{species}"] = _env_dict(
            cf.beta_envelope(model.marks, alpha, species, horizon)
        )
    return out


def regime_to_dict(verdict) -> dict:
    def species(th):
        return {
            "class": th.species_class.value,
            "growth": _env_dict(th.growth),
            "noise_penalty": _env_dict(th.noise_penalty),
            "threshold_low": th.threshold_low,
            "threshold_high": th.threshold_high,
        }

    return {
        "species1": species(verdict.species1),
        "species2": species(verdict.species2),
        "joint": verdict.joint.value,
    }


@dataclass
class RunReport:
    """Scenario echo, resolved envelopes, regime verdict, and one verdict per
    enabled check."""

    scenario: dict
    envelopes: dict
    regime: dict
    checks: list = field(default_factory=list)
    path_files: list = field(default_factory=list)
    artifacts: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "envelopes": self.envelopes,
            "regime": self.regime,
            "checks": self.checks,
            "path_files": self.path_files,
            "artifacts": self.artifacts,
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def base_report(scenario: Scenario, verdict) -> RunReport:
    return RunReport(
        scenario=scenario_to_dict(scenario, include_execution=False),
        envelopes=resolve_envelopes(scenario),
        regime=regime_to_dict(verdict),
    )
