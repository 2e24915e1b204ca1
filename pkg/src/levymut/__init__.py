"""Simulation and verification toolkit for a two-species mutualism model
driven by Brownian motion and compound-Poisson jumps.

The main entry points:

- build a :class:`ModelSpec` from :mod:`levymut.coeffs` coefficients,
- integrate paths with :func:`simulate_path` (log-coordinate scheme on a
  jump-adapted grid) or cross-check with :func:`simulate_direct`,
- compute the pathwise comparison bounds with :func:`bound_processes` and
  count violations with :func:`verify_sandwich`,
- classify the theoretical regime with :func:`classify_regime`,
- run ensembles with :func:`run_ensemble` and probe the asymptotic claims
  via :mod:`levymut.analysis`,
- or drive everything from a scenario file through the ``levymut`` CLI.
"""

from .coeffs import (
    Constant,
    Coefficient,
    Envelope,
    Mark,
    MarkTable,
    Sinusoid,
    Table,
    beta,
    beta_envelope,
    envelope,
    eval_coefficient,
)
from .levy import (
    JumpStream,
    PathStreams,
    RngStream,
    compensator_rates,
    jump_q_moment,
    log_jump_size,
    path_streams,
    sample_jumps,
)
from .sim import (
    ModelSpec,
    NoiseRecord,
    PathRecord,
    SimulationOverflowError,
    build_grid,
    deterministic_equilibrium,
    restrict_noise,
    sample_noise,
    simulate_direct,
    simulate_path,
)
from .bounds import BoundTrajectories, SandwichReport, bound_processes, verify_sandwich
from .ensemble import EnsembleError, EnsembleSummary, run_ensemble
from .analysis import (
    JointRegime,
    MomentCurve,
    PermanenceProbe,
    PersistenceBounds,
    RegimeVerdict,
    SpeciesClass,
    classify_regime,
    empirical_moment,
    lyapunov_log_slope,
    martingale_diagnostics,
    permanence_probe,
    persistence_bounds,
    time_average,
)
from .convergence import ConvergenceStudy, convergence_study
from .scenario import Scenario, ScenarioError, load_scenario, save_scenario
from .verify import run_verification

__version__ = "0.1.0"

__all__ = [
    "BoundTrajectories",
    "Coefficient",
    "Constant",
    "ConvergenceStudy",
    "EnsembleError",
    "EnsembleSummary",
    "Envelope",
    "JointRegime",
    "JumpStream",
    "Mark",
    "MarkTable",
    "ModelSpec",
    "MomentCurve",
    "NoiseRecord",
    "PathRecord",
    "PathStreams",
    "PermanenceProbe",
    "PersistenceBounds",
    "RegimeVerdict",
    "RngStream",
    "SandwichReport",
    "Scenario",
    "ScenarioError",
    "Sinusoid",
    "SimulationOverflowError",
    "SpeciesClass",
    "Table",
    "beta",
    "beta_envelope",
    "bound_processes",
    "build_grid",
    "classify_regime",
    "compensator_rates",
    "convergence_study",
    "deterministic_equilibrium",
    "empirical_moment",
    "envelope",
    "eval_coefficient",
    "jump_q_moment",
    "load_scenario",
    "log_jump_size",
    "lyapunov_log_slope",
    "martingale_diagnostics",
    "path_streams",
    "permanence_probe",
    "persistence_bounds",
    "restrict_noise",
    "run_ensemble",
    "run_verification",
    "sample_jumps",
    "sample_noise",
    "save_scenario",
    "simulate_direct",
    "simulate_path",
    "time_average",
    "verify_sandwich",
]
