"""Runs a scenario's enabled checks and renders one verdict per check.

Each check compares a Monte Carlo measurement against the closed-form
threshold it is supposed to obey and records the measured values, the
thresholds, and the pass/fail verdict.  Checks whose regime precondition is
not met (e.g. an extinction check on a persistent configuration) report
applicable=false and pass vacuously rather than guessing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analysis import (
    JointRegime,
    SpeciesClass,
    classify_regime,
    empirical_moment,
    martingale_envelopes,
    permanence_probe,
    persistence_bounds,
)
from .convergence import convergence_study
from .ensemble import run_ensemble
from .levy import jump_q_moment
from .scenario import Scenario

# Standard thresholds used by the checks; every one of them is also declared
# in the emitted report next to the measured value.
SANDWICH_MAX_FRACTION = 1e-3
EXTINCTION_TERMINAL_LEVEL = 1e-3
REQUIRED_PATH_FRACTION = 0.95
PERSISTENCE_MARGIN = 0.95
CONVERGENCE_RATIO_RANGE = (1.2, 1.7)


@dataclass
class VerificationOutcome:
    report: object
    ensemble: object | None
    study: object | None


def _result(name, passed, applicable, measured, thresholds):
    return {
        "name": name,
        "passed": bool(passed),
        "applicable": bool(applicable),
        "measured": measured,
        "thresholds": thresholds,
    }


def _check_regime(verdict):
    # Classification is a statement, not a measurement; it cannot fail.
    return _result(
        "regime",
        passed=True,
        applicable=True,
        measured={
            "species1": verdict.species1.species_class.value,
            "species2": verdict.species2.species_class.value,
            "joint": verdict.joint.value,
        },
        thresholds={},
    )


def _check_sandwich(check, ensemble):
    agg = ensemble.sandwich
    passed = (
        agg.violation_fraction <= SANDWICH_MAX_FRACTION
        and agg.ordering_violations == 0
    )
    return _result(
        "sandwich",
        passed=passed,
        applicable=True,
        measured={
            "violation_fraction": agg.violation_fraction,
            "worst_relative_violation": agg.worst_relative_violation,
            "ordering_violations": agg.ordering_violations,
            "total_points": agg.total_points,
        },
        thresholds={
            "rel_tol": check.rel_tol,
            "max_violation_fraction": SANDWICH_MAX_FRACTION,
        },
    )


def _species_items(verdict, wanted):
    for species in (1, 2):
        if verdict.thresholds(species).species_class is wanted:
            yield species


def _check_extinction(scenario, verdict, ensemble):
    measured = {}
    passed = True
    applicable = False
    T = scenario.horizon
    envelopes = martingale_envelopes(scenario.model, T, 1)
    for species in _species_items(verdict, SpeciesClass.EXTINCT):
        applicable = True
        th = verdict.thresholds(species)
        # Median terminal log slope may exceed the decay rate bound only by
        # the per-path martingale noise scale over horizon T.
        diffusion_env, jump_env = envelopes[species]
        slope_bound = th.threshold_high + 3.0 * (diffusion_env + jump_env)
        terminal = ensemble.terminal(species)
        slopes = np.sort(ensemble.log_slopes(species))
        frac_small = float(np.mean(terminal < EXTINCTION_TERMINAL_LEVEL))
        median_slope = float(np.median(slopes))
        ok = frac_small >= REQUIRED_PATH_FRACTION and median_slope <= slope_bound
        passed = passed and ok
        measured[f"species{species}"] = {
            "fraction_below_level": frac_small,
            "median_log_slope": median_slope,
            "slope_bound": slope_bound,
        }
    return _result(
        "extinction",
        passed=passed,
        applicable=applicable,
        measured=measured,
        thresholds={
            "terminal_level": EXTINCTION_TERMINAL_LEVEL,
            "required_path_fraction": REQUIRED_PATH_FRACTION,
        },
    )


def _check_persistence(scenario, verdict, ensemble):
    measured = {}
    passed = True
    applicable = False
    for species in _species_items(verdict, SpeciesClass.PERSISTENT):
        applicable = True
        pb = persistence_bounds(scenario.model, species, scenario.horizon)
        target = PERSISTENCE_MARGIN * pb.lower_for_check
        averages = ensemble.terminal_time_average(species)
        frac = float(np.mean(averages >= target))
        ok = frac >= REQUIRED_PATH_FRACTION
        passed = passed and ok
        measured[f"species{species}"] = {
            "lower_bound": pb.lower,
            "lower_bound_capacity_scaled": pb.lower_capacity_scaled,
            "upper_bound": pb.upper,
            "target": target,
            "fraction_above_target": frac,
            "mean_time_average": float(averages.mean()),
        }
    return _result(
        "persistence",
        passed=passed,
        applicable=applicable,
        measured=measured,
        thresholds={
            "margin": PERSISTENCE_MARGIN,
            "required_path_fraction": REQUIRED_PATH_FRACTION,
        },
    )


def _check_moments(scenario, ensemble):
    measured = {}
    passed = True
    for q in scenario.checks.moments:
        curves = empirical_moment(ensemble, q)
        entry = {}
        for species, tag in ((1, "x"), (2, "y")):
            mc = curves[species]
            certificate = jump_q_moment(
                scenario.model.marks, species, q, scenario.horizon
            )
            entry[tag] = {
                "bounded": mc.bounded,
                "trailing_slope": mc.trailing_slope,
                "slope_se": mc.slope_se,
                "jump_moment_certificate": certificate,
            }
            passed = passed and mc.bounded
        measured[f"q={q:g}"] = entry
    return _result(
        "moments",
        passed=passed,
        applicable=bool(scenario.checks.moments),
        measured=measured,
        thresholds={"slope_z_crit": 2.576},
    )


def _check_permanence(scenario, verdict, ensemble):
    applicable = verdict.joint is JointRegime.BOTH_PERSISTENT
    check = scenario.checks.permanence
    measured = {}
    passed = True
    if applicable:
        probes = permanence_probe(ensemble, check.epsilon)
        for species, tag in ((1, "x"), (2, "y")):
            p = probes[species]
            measured[tag] = {
                "zeta_lower": p.zeta_lower,
                "zeta_upper": p.zeta_upper,
                "zeta_lower_ci": p.zeta_lower_ci,
                "mass_fraction": p.mass_fraction,
                "pooled_count": p.pooled_count,
            }
            passed = passed and p.confined
    else:
        measured["note"] = "regime is not both-persistent; probe not applicable"
    return _result(
        "permanence",
        passed=passed,
        applicable=applicable,
        measured=measured,
        thresholds={"epsilon": check.epsilon, "ci_confidence": 0.99},
    )


def _check_convergence(scenario, threads):
    check = scenario.checks.convergence
    n_paths = check.n_paths if check.n_paths is not None else scenario.n_paths
    study = convergence_study(
        scenario.model,
        check.dt_levels,
        scenario.horizon,
        n_paths,
        scenario.base_seed,
        threads=threads,
    )
    lo, hi = CONVERGENCE_RATIO_RANGE
    ratios = study.direct_ratios
    passed = bool(np.all((ratios >= lo) & (ratios <= hi)))
    return (
        _result(
            "convergence",
            passed=passed,
            applicable=True,
            measured={
                "dt_levels": list(study.dt_levels),
                "direct_rms": study.direct_rms.tolist(),
                "direct_ratios": ratios.tolist(),
                "log_rms": study.log_rms.tolist(),
                "log_ratios": study.log_ratios.tolist(),
                "cross_scheme_rms": study.cross_rms.tolist(),
                "excluded_paths": study.n_excluded,
            },
            thresholds={"ratio_range": list(CONVERGENCE_RATIO_RANGE)},
        ),
        study,
    )


def _needs_ensemble(checks) -> bool:
    return bool(
        checks.sandwich is not None
        or checks.persistence
        or checks.extinction
        or checks.moments
        or checks.permanence is not None
    )


def run_verification(
    scenario: Scenario, *, threads=None, collect_rows=False
) -> VerificationOutcome:
    """Execute every enabled check of a scenario.

    Returns the report plus the shared ensemble and the convergence study
    when they were needed, so callers can emit CSV artifacts from the same
    run the verdicts came from.
    """
    from .report import base_report

    threads = scenario.threads if threads is None else threads
    verdict = classify_regime(scenario.model, scenario.horizon)
    report = base_report(scenario, verdict)
    checks = scenario.checks

    ensemble = None
    if _needs_ensemble(checks):
        rel_tol = checks.sandwich.rel_tol if checks.sandwich is not None else None
        ensemble = run_ensemble(
            scenario.model,
            scenario.dt,
            scenario.horizon,
            scenario.n_paths,
            scenario.base_seed,
            threads=threads,
            report_points=scenario.report_points,
            sandwich_rel_tol=rel_tol,
            collect_rows=collect_rows,
        )

    if checks.regime:
        report.checks.append(_check_regime(verdict))
    if checks.sandwich is not None:
        report.checks.append(_check_sandwich(checks.sandwich, ensemble))
    if checks.extinction:
        report.checks.append(_check_extinction(scenario, verdict, ensemble))
    if checks.persistence:
        report.checks.append(_check_persistence(scenario, verdict, ensemble))
    if checks.moments:
        report.checks.append(_check_moments(scenario, ensemble))
    if checks.permanence is not None:
        report.checks.append(_check_permanence(scenario, verdict, ensemble))

    study = None
    if checks.convergence is not None:
        result, study = _check_convergence(scenario, threads)
        report.checks.append(result)

    return VerificationOutcome(report=report, ensemble=ensemble, study=study)
