"""Finite-horizon checks of the model's asymptotic claims.

The long-run fate of each species is decided by comparing its growth rate
envelope against its noise penalty envelope: growth inf above penalty sup
means persistence, growth sup below penalty inf means extinction, and the
band in between is honestly reported as indeterminate.  The remaining
functions turn ensembles into the empirical quantities those claims are
about: time averages, terminal log slopes, moments, quantile bands, and
martingale drift diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import stats

from . import coeffs as cf
from .levy import log_square_rate_sup
from .sim import ModelSpec, PathRecord


class SpeciesClass(Enum):
    PERSISTENT = "Persistent"
    EXTINCT = "Extinct"
    INDETERMINATE = "Indeterminate"


class JointRegime(Enum):
    """Joint classification of the species pair."""

    BOTH_EXTINCT = "A"
    ONLY_FIRST_PERSISTENT = "B"
    ONLY_SECOND_PERSISTENT = "C"
    BOTH_PERSISTENT = "BothPersistent"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class SpeciesThresholds:
    """Envelope data and the derived classification for one species."""

    growth: cf.Envelope
    noise_penalty: cf.Envelope
    species_class: SpeciesClass

    @property
    def threshold_low(self) -> float:
        """growth inf minus penalty sup; positive means persistent."""
        return self.growth.inf - self.noise_penalty.sup

    @property
    def threshold_high(self) -> float:
        """growth sup minus penalty inf; negative means extinct."""
        return self.growth.sup - self.noise_penalty.inf


@dataclass(frozen=True)
class RegimeVerdict:
    species1: SpeciesThresholds
    species2: SpeciesThresholds
    joint: JointRegime

    def thresholds(self, species) -> SpeciesThresholds:
        return self.species1 if species == 1 else self.species2


def _classify_species(model: ModelSpec, species, horizon) -> SpeciesThresholds:
    r, _, _, _, alpha = model.species(species)
    growth = r.envelope(horizon)
    penalty = cf.beta_envelope(model.marks, alpha, species, horizon)
    if growth.inf - penalty.sup > 0.0:
        klass = SpeciesClass.PERSISTENT
    elif growth.sup - penalty.inf < 0.0:
        klass = SpeciesClass.EXTINCT
    else:
        klass = SpeciesClass.INDETERMINATE
    return SpeciesThresholds(growth, penalty, klass)


_JOINT = {
    (SpeciesClass.EXTINCT, SpeciesClass.EXTINCT): JointRegime.BOTH_EXTINCT,
    (SpeciesClass.PERSISTENT, SpeciesClass.EXTINCT): JointRegime.ONLY_FIRST_PERSISTENT,
    (SpeciesClass.EXTINCT, SpeciesClass.PERSISTENT): JointRegime.ONLY_SECOND_PERSISTENT,
    (SpeciesClass.PERSISTENT, SpeciesClass.PERSISTENT): JointRegime.BOTH_PERSISTENT,
}


def classify_regime(model: ModelSpec, horizon) -> RegimeVerdict:
    """Theoretical per-species and joint classification from envelopes only."""
    s1 = _classify_species(model, 1, horizon)
    s2 = _classify_species(model, 2, horizon)
    joint = _JOINT.get((s1.species_class, s2.species_class), JointRegime.INDETERMINATE)
    return RegimeVerdict(s1, s2, joint)


@dataclass(frozen=True)
class PersistenceBounds:
    """Long-run time-average bounds for one persistent species.

    Two published lower-bound variants differ by the capacity-inf factor;
    both are reported and verification uses the plain (conservative) one.
    The upper value caps the *decoupled* comparison process (equivalently,
    the species when its partner is extinct); with a thriving partner the
    mutualism boost can push the true average above it, so only the lower
    bound is a universal guarantee.  Bounds are still computed outside the
    persistent regime but flagged non-applicable.
    """

    lower: float
    lower_capacity_scaled: float
    upper: float
    applicable: bool

    @property
    def lower_for_check(self) -> float:
        return min(self.lower, self.lower_capacity_scaled)


def persistence_bounds(model: ModelSpec, species, horizon) -> PersistenceBounds:
    """Evaluate the closed-form time-average bounds from envelopes."""
    r, b, K, eps, alpha = model.species(species)
    r_env = r.envelope(horizon)
    b_env = b.envelope(horizon)
    K_env = K.envelope(horizon)
    e_env = eps.envelope(horizon)
    beta_env = cf.beta_envelope(model.marks, alpha, species, horizon)

    margin_low = r_env.inf - beta_env.sup
    margin_high = r_env.sup - beta_env.inf
    lower = margin_low / (b_env.sup + e_env.sup * K_env.inf)
    lower_scaled = K_env.inf * margin_low / (e_env.sup * K_env.inf + b_env.sup)
    upper = K_env.sup * margin_high / (K_env.sup * e_env.inf + b_env.inf)
    return PersistenceBounds(
        lower=lower,
        lower_capacity_scaled=lower_scaled,
        upper=upper,
        applicable=margin_low > 0.0,
    )


def running_time_average(grid, values) -> np.ndarray:
    """(1/t) * integral of values over [0, t] by the trapezoid rule.

    The t=0 entry is the integrand's initial value (its limit).
    """
    grid = np.asarray(grid, float)
    values = np.asarray(values, float)
    cells = 0.5 * (values[:-1] + values[1:]) * np.diff(grid)
    integral = np.concatenate([[0.0], np.cumsum(cells)])
    out = np.empty_like(integral)
    out[0] = values[0]
    out[1:] = integral[1:] / grid[1:]
    return out


def time_average(path: PathRecord, species) -> np.ndarray:
    """Running time-average curve of one species along a path."""
    return running_time_average(path.grid, path.state(species))


def lyapunov_log_slope(path: PathRecord, species) -> float:
    """ln(state(T)) / T — the empirical exponential growth/decay rate."""
    T = path.horizon
    if T <= 0:
        raise ValueError("path must have positive horizon")
    logs = path.u if species == 1 else path.v
    return float(logs[-1] / T)


def martingale_diagnostics(path: PathRecord):
    """Endpoint ratios (M1/T, M2/T, Q1/T, Q2/T); each tends to zero."""
    T = path.horizon
    if T <= 0:
        raise ValueError("path must have positive horizon")
    return (
        float(path.M1[-1] / T),
        float(path.M2[-1] / T),
        float(path.Q1[-1] / T),
        float(path.Q2[-1] / T),
    )


def martingale_envelopes(model: ModelSpec, horizon, n_paths, z=3.0):
    """Per-species (diffusion, jump) noise envelopes for ensemble-mean drift.

    The ensemble mean of M_i(T)/T has standard deviation at most
    alpha_sup/sqrt(T*N); the jump accumulator's variance rate is bounded by
    the squared log-jump mass sup.  ``z`` standard errors of each.
    """
    out = {}
    for species in (1, 2):
        alpha_sup = model.species(species)[4].envelope(horizon).sup
        qvar_rate = log_square_rate_sup(model.marks, species, horizon)
        out[species] = (
            z * alpha_sup / math.sqrt(horizon * n_paths),
            z * math.sqrt(qvar_rate / (horizon * n_paths)),
        )
    return out


@dataclass(frozen=True)
class MomentCurve:
    """Monte Carlo moment curve for one species with a trend verdict.

    ``bounded`` is true when the least-squares slope of the trailing window
    is nonpositive within ``z_crit`` standard errors; the SE comes from the
    cross-path spread of per-path slopes, which are iid.
    """

    times: np.ndarray
    values: np.ndarray
    trailing_slope: float
    slope_se: float
    z_crit: float
    bounded: bool


def _per_path_slopes(times, curves):
    """Least-squares slope of each row of ``curves`` against ``times``."""
    t = times - times.mean()
    denom = np.dot(t, t)
    if denom == 0.0:
        raise ValueError("need at least two distinct report times")
    centered = curves - curves.mean(axis=1, keepdims=True)
    return centered @ t / denom


def empirical_moment(ensemble, q, trailing_fraction=0.2, z_crit=2.576):
    """E[x^q] and E[y^q] curves with trailing-window boundedness flags.

    Returns a dict {1: MomentCurve, 2: MomentCurve}.  The flag tests the
    slope of the trailing ``trailing_fraction`` of the horizon.
    """
    if q <= 0:
        raise ValueError("q must be positive")
    times = ensemble.report_times
    cutoff = times[-1] - trailing_fraction * (times[-1] - times[0])
    window = times >= cutoff
    out = {}
    for species in (1, 2):
        samples = ensemble.states(species) ** q
        curve = samples.mean(axis=0)
        slopes = _per_path_slopes(times[window], samples[:, window])
        slope = float(slopes.mean())
        se = float(slopes.std(ddof=1) / math.sqrt(slopes.size))
        out[species] = MomentCurve(
            times=times,
            values=curve,
            trailing_slope=slope,
            slope_se=se,
            z_crit=z_crit,
            bounded=bool(slope <= z_crit * se),
        )
    return out


@dataclass(frozen=True)
class PermanenceProbe:
    """Empirical quantile band of terminal-window states for one species."""

    zeta_upper: float
    zeta_lower: float
    zeta_lower_ci: float
    mass_fraction: float
    epsilon: float
    pooled_count: int
    applicable: bool

    @property
    def confined(self) -> bool:
        return (
            self.applicable
            and self.zeta_lower_ci > 0.0
            and self.mass_fraction >= 1.0 - self.epsilon
        )


def _quantile_ci_lower(sorted_pool, p, confidence=0.99):
    """Lower endpoint of the order-statistic CI for the p-quantile."""
    m = sorted_pool.size
    k = int(stats.binom.ppf((1.0 - confidence) / 2.0, m, p))
    k = max(k, 1)
    return float(sorted_pool[k - 1])


def permanence_probe(ensemble, epsilon, window=None):
    """Quantile band (zeta_lower, zeta_upper) of pooled terminal states.

    Pools each species' states at report times inside ``window`` (default:
    trailing 10% of the horizon) over all paths and takes the (eps/2,
    1-eps/2) quantiles as order statistics (lower/higher interpolation), so
    the band holds at least 1-eps of the pooled mass by construction; the
    substantive claim is that the lower level is bounded away from zero,
    checked via a 99% order-statistic CI.  Flagged non-applicable when the
    regime is not both-persistent.

    Returns a dict {1: PermanenceProbe, 2: PermanenceProbe}.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must be in (0, 1)")
    times = ensemble.report_times
    if window is None:
        window = (times[-1] - 0.1 * (times[-1] - times[0]), times[-1])
    lo, hi = window
    sel = (times >= lo) & (times <= hi)
    if not np.any(sel):
        raise ValueError("terminal window contains no report times")
    verdict = classify_regime(ensemble.model, ensemble.horizon)
    applicable = verdict.joint is JointRegime.BOTH_PERSISTENT
    out = {}
    for species in (1, 2):
        pool = np.sort(ensemble.states(species)[:, sel].ravel())
        z_lo = float(np.quantile(pool, epsilon / 2.0, method="lower"))
        z_hi = float(np.quantile(pool, 1.0 - epsilon / 2.0, method="higher"))
        inside = np.count_nonzero((pool >= z_lo) & (pool <= z_hi))
        out[species] = PermanenceProbe(
            zeta_upper=z_hi,
            zeta_lower=z_lo,
            zeta_lower_ci=_quantile_ci_lower(pool, epsilon / 2.0),
            mass_fraction=inside / pool.size,
            epsilon=epsilon,
            pooled_count=int(pool.size),
            applicable=applicable,
        )
    return out
