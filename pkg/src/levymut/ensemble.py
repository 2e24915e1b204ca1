"""Deterministic Monte Carlo ensembles of simulated paths.

Each path draws its own counter-based streams keyed by (base seed, path
index), and every aggregate is stored indexed by path id, so the summary is
bitwise identical for any worker count or completion order.  Full paths are
reduced on the fly to per-path scalars plus cross-sections on a common
report grid; holding every trajectory of a long ensemble in memory would be
several GB.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analysis import running_time_average
from .bounds import SandwichReport, bound_processes, verify_sandwich
from .levy import path_streams
from .sim import ModelSpec, SimulationOverflowError, simulate_path, uniform_grid


class EnsembleError(RuntimeError):
    """Raised when too many paths abort."""


@dataclass
class EnsembleSummary:
    """Reduced view of an ensemble on the shared report grid.

    Cross-section arrays have shape (n_paths, n_report); scalar diagnostics
    have shape (n_paths,).  Aborted paths hold NaN rows and are excluded by
    the accessors.
    """

    model: ModelSpec
    dt: float
    horizon: float
    base_seed: int
    n_paths: int
    report_times: np.ndarray
    x_report: np.ndarray
    y_report: np.ndarray
    avgx_report: np.ndarray
    avgy_report: np.ndarray
    log_slope_x: np.ndarray
    log_slope_y: np.ndarray
    m1_over_T: np.ndarray
    m2_over_T: np.ndarray
    q1_over_T: np.ndarray
    q2_over_T: np.ndarray
    aborted: np.ndarray
    sandwich: SandwichReport | None = None
    # optional per-path (n_paths, n_report) arrays for CSV emission:
    # u, v, M1, M2, Q1, Q2 and, when the sandwich was computed, the four
    # comparison bounds upper_x/lower_x/upper_y/lower_y
    rows: dict | None = None

    @property
    def valid(self) -> np.ndarray:
        return ~self.aborted

    @property
    def n_valid(self) -> int:
        return int(np.count_nonzero(self.valid))

    def states(self, species) -> np.ndarray:
        rows = self.x_report if species == 1 else self.y_report
        return rows[self.valid]

    def time_averages(self, species) -> np.ndarray:
        rows = self.avgx_report if species == 1 else self.avgy_report
        return rows[self.valid]

    def terminal(self, species) -> np.ndarray:
        return self.states(species)[:, -1]

    def terminal_time_average(self, species) -> np.ndarray:
        return self.time_averages(species)[:, -1]

    def log_slopes(self, species) -> np.ndarray:
        rows = self.log_slope_x if species == 1 else self.log_slope_y
        return rows[self.valid]

    def martingale_ratios(self):
        """(mean M1/T, mean M2/T, mean Q1/T, mean Q2/T) over valid paths."""
        v = self.valid
        return (
            float(self.m1_over_T[v].mean()),
            float(self.m2_over_T[v].mean()),
            float(self.q1_over_T[v].mean()),
            float(self.q2_over_T[v].mean()),
        )

    def mean_curve(self, species) -> np.ndarray:
        return self.states(species).mean(axis=0)

    def quantile_curve(self, species, q) -> np.ndarray:
        return np.quantile(self.states(species), q, axis=0)

    def moment_curve(self, species, q) -> np.ndarray:
        return (self.states(species) ** q).mean(axis=0)


def report_grid(dt, horizon, report_points) -> np.ndarray:
    """Subset of the uniform grid used for cross-path statistics."""
    uniform = uniform_grid(dt, horizon)
    if report_points >= uniform.size:
        return uniform
    idx = np.unique(np.round(np.linspace(0, uniform.size - 1, report_points)).astype(int))
    return uniform[idx]


def _reduce_path(path, report_times, sandwich_rel_tol, model, collect_rows):
    pos = np.searchsorted(path.grid, report_times)
    if not np.array_equal(path.grid[pos], report_times):
        raise AssertionError("report times missing from the path grid")
    T = path.horizon
    avg_x = running_time_average(path.grid, path.x)
    avg_y = running_time_average(path.grid, path.y)
    report = None
    bound = None
    if sandwich_rel_tol is not None:
        bound = bound_processes(model, path)
        report = verify_sandwich(path, bound, sandwich_rel_tol)
    rows = None
    if collect_rows:
        rows = {
            "u": path.u[pos],
            "v": path.v[pos],
            "M1": path.M1[pos],
            "M2": path.M2[pos],
            "Q1": path.Q1[pos],
            "Q2": path.Q2[pos],
        }
        if bound is not None:
            rows["upper_x"] = bound.upper_x[pos]
            rows["lower_x"] = bound.lower_x[pos]
            rows["upper_y"] = bound.upper_y[pos]
            rows["lower_y"] = bound.lower_y[pos]
    return (
        path.x[pos],
        path.y[pos],
        avg_x[pos],
        avg_y[pos],
        path.u[-1] / T,
        path.v[-1] / T,
        path.M1[-1] / T,
        path.M2[-1] / T,
        path.Q1[-1] / T,
        path.Q2[-1] / T,
        report,
        rows,
    )


def run_ensemble(
    model: ModelSpec,
    dt,
    horizon,
    n_paths,
    base_seed,
    *,
    threads=1,
    report_points=401,
    sandwich_rel_tol=None,
    max_abort_fraction=0.01,
    collect_rows=False,
) -> EnsembleSummary:
    """Simulate ``n_paths`` independent paths and aggregate their statistics.

    Per-path aborts (state overflow) are counted and tolerated up to
    ``max_abort_fraction``; beyond that the run fails.  When
    ``sandwich_rel_tol`` is set, each path's comparison bounds are computed
    from its own noise record and violation counts are aggregated.
    """
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    report_times = report_grid(dt, horizon, report_points)
    R = report_times.size

    x_rep = np.full((n_paths, R), np.nan)
    y_rep = np.full((n_paths, R), np.nan)
    ax_rep = np.full((n_paths, R), np.nan)
    ay_rep = np.full((n_paths, R), np.nan)
    scalars = np.full((n_paths, 6), np.nan)
    aborted = np.zeros(n_paths, dtype=bool)
    reports: list = [None] * n_paths
    failures: list = []
    row_keys = ["u", "v", "M1", "M2", "Q1", "Q2"]
    if sandwich_rel_tol is not None:
        row_keys += ["upper_x", "lower_x", "upper_y", "lower_y"]
    rows = (
        {k: np.full((n_paths, R), np.nan) for k in row_keys} if collect_rows else None
    )

    def worker(j):
        streams = path_streams(base_seed, j)
        try:
            path = simulate_path(model, dt, horizon, streams)
        except SimulationOverflowError as err:
            return j, None, str(err)
        reduced = _reduce_path(path, report_times, sandwich_rel_tol, model, collect_rows)
        return j, reduced, None

    def consume(result):
        j, reduced, error = result
        if error is not None:
            aborted[j] = True
            failures.append(f"path {j}: {error}")
            return
        x_rep[j], y_rep[j], ax_rep[j], ay_rep[j] = reduced[0:4]
        scalars[j] = reduced[4:10]
        reports[j] = reduced[10]
        if rows is not None:
            for k, array in reduced[11].items():
                rows[k][j] = array

    if threads <= 1:
        for j in range(n_paths):
            consume(worker(j))
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for result in pool.map(worker, range(n_paths)):
                consume(result)

    if np.count_nonzero(aborted) > max_abort_fraction * n_paths:
        raise EnsembleError(
            f"{np.count_nonzero(aborted)}/{n_paths} paths aborted; first: "
            + "; ".join(failures[:3])
        )

    sandwich = None
    if sandwich_rel_tol is not None:
        for rep in reports:
            if rep is not None:
                sandwich = rep if sandwich is None else sandwich.merge(rep)

    return EnsembleSummary(
        model=model,
        dt=dt,
        horizon=horizon,
        base_seed=base_seed,
        n_paths=n_paths,
        report_times=report_times,
        x_report=x_rep,
        y_report=y_rep,
        avgx_report=ax_rep,
        avgy_report=ay_rep,
        log_slope_x=scalars[:, 0],
        log_slope_y=scalars[:, 1],
        m1_over_T=scalars[:, 2],
        m2_over_T=scalars[:, 3],
        q1_over_T=scalars[:, 4],
        q2_over_T=scalars[:, 5],
        aborted=aborted,
        sandwich=sandwich,
        rows=rows,
    )
