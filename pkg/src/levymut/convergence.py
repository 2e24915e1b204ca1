"""Strong self-convergence study over nested step sizes.

All levels of one path share a single noise realization: increments are
drawn on the finest grid and summed into coarser cells, so endpoint
differences between levels measure pure discretization error.  The
direct-coordinate scheme carries the multiplicative-noise order-1/2 error
(successive-level RMS ratio about sqrt(2)); the log-coordinate scheme's
diffusion is state-independent, which makes it effectively first order, so
its ratio sits near 2.  Both are reported, along with the cross-scheme
difference at each level.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .levy import path_streams
from .sim import (
    ModelSpec,
    restrict_noise,
    sample_noise,
    simulate_direct,
    simulate_path,
    uniform_grid,
)


@dataclass(frozen=True)
class ConvergenceStudy:
    """RMS endpoint differences between successive dt levels (coarse first)."""

    dt_levels: tuple
    n_paths: int
    n_excluded: int
    direct_rms: np.ndarray
    log_rms: np.ndarray
    cross_rms: np.ndarray

    @property
    def direct_ratios(self) -> np.ndarray:
        return self.direct_rms[:-1] / self.direct_rms[1:]

    @property
    def log_ratios(self) -> np.ndarray:
        return self.log_rms[:-1] / self.log_rms[1:]

    @property
    def cross_ratios(self) -> np.ndarray:
        return self.cross_rms[:-1] / self.cross_rms[1:]


def _level_factors(dt_levels, horizon):
    levels = sorted(set(float(d) for d in dt_levels), reverse=True)
    if len(levels) < 2:
        raise ValueError("need at least two dt levels")
    fine = levels[-1]
    factors = []
    for d in levels:
        f = round(d / fine)
        if f < 1 or abs(f * fine - d) > 1e-12 * max(1.0, d):
            raise ValueError(f"dt level {d} is not an integer multiple of {fine}")
        factors.append(int(f))
    cells = uniform_grid(fine, horizon).size - 1
    for d, f in zip(levels, factors):
        if cells % f != 0:
            raise ValueError(f"horizon is not an integer number of {d} steps")
    return levels, factors


def validate_levels(dt_levels, horizon):
    """Raise ValueError unless the levels nest exactly within the horizon."""
    _level_factors(dt_levels, horizon)


def convergence_study(
    model: ModelSpec, dt_levels, horizon, n_paths, base_seed, *, threads=1
) -> ConvergenceStudy:
    """Endpoint self-convergence table over ``dt_levels`` with frozen noise.

    Paths flagged positivity-violated by the direct scheme at any level are
    excluded from every statistic so all levels average the same paths.
    Differences pool both species; RMS is over paths and species.
    """
    levels, factors = _level_factors(dt_levels, horizon)
    L = len(levels)
    fine = levels[-1]

    log_end = np.full((L, n_paths, 2), np.nan)
    dir_end = np.full((L, n_paths, 2), np.nan)
    bad = np.zeros(n_paths, dtype=bool)

    def worker(j):
        streams = path_streams(base_seed, j)
        fine_noise = sample_noise(model.marks, fine, horizon, streams)
        out_log = np.empty((L, 2))
        out_dir = np.empty((L, 2))
        violated = False
        for i, f in enumerate(factors):
            noise = restrict_noise(fine_noise, f)
            p_log = simulate_path(model, noise=noise)
            p_dir = simulate_direct(model, noise=noise)
            out_log[i] = (p_log.x[-1], p_log.y[-1])
            out_dir[i] = (p_dir.x[-1], p_dir.y[-1])
            violated = violated or p_dir.positivity_violated
        return j, out_log, out_dir, violated

    def consume(result):
        j, out_log, out_dir, violated = result
        log_end[:, j, :] = out_log
        dir_end[:, j, :] = out_dir
        bad[j] = violated

    if threads <= 1:
        for j in range(n_paths):
            consume(worker(j))
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for result in pool.map(worker, range(n_paths)):
                consume(result)

    keep = ~bad
    if not np.any(keep):
        raise RuntimeError("every path was positivity-violated; refine dt")

    def rms(diff):
        return float(np.sqrt(np.mean(diff[keep] ** 2)))

    direct_rms = np.array(
        [rms(dir_end[i] - dir_end[i + 1]) for i in range(L - 1)]
    )
    log_rms = np.array([rms(log_end[i] - log_end[i + 1]) for i in range(L - 1)])
    cross_rms = np.array([rms(dir_end[i] - log_end[i]) for i in range(L)])
    return ConvergenceStudy(
        dt_levels=tuple(levels),
        n_paths=n_paths,
        n_excluded=int(np.count_nonzero(bad)),
        direct_rms=direct_rms,
        log_rms=log_rms,
        cross_rms=cross_rms,
    )
