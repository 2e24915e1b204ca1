"""Pathwise comparison bounds that sandwich every solution.

Each species is bounded above and below by explicitly solvable stochastic
logistic processes driven by the *same* noise record as the path itself:
the upper process drops the mutualism drag entirely, the lower process
replaces it with its worst case b/K.  Both share one exponent process

    E(t) = integral(r - beta) + M(t) + Q(t)

and differ only in the damping coefficient inside the denominator integral,
so the lower bound can never exceed the upper one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sim import ModelSpec, PathRecord, _SpeciesArrays, jump_log_array


@dataclass(frozen=True)
class BoundTrajectories:
    """Grid-aligned comparison processes and their exponent processes.

    upper_x/lower_x sandwich x, upper_y/lower_y sandwich y; all four are
    strictly positive and start at the path's initial state.
    """

    grid: np.ndarray
    upper_x: np.ndarray
    lower_x: np.ndarray
    upper_y: np.ndarray
    lower_y: np.ndarray
    exponent_x: np.ndarray
    exponent_y: np.ndarray


@dataclass(frozen=True)
class SandwichReport:
    """Counts of grid points violating each sandwich inequality."""

    x_below_lower: int
    x_above_upper: int
    y_below_lower: int
    y_above_upper: int
    total_points: int
    worst_relative_violation: float
    rel_tol: float
    # lower > upper occurrences, counted at zero tolerance; structurally zero
    # because both denominators accumulate through the same monotone logaddexp
    ordering_violations: int = 0

    @property
    def total_violations(self) -> int:
        return (
            self.x_below_lower
            + self.x_above_upper
            + self.y_below_lower
            + self.y_above_upper
        )

    @property
    def violation_fraction(self) -> float:
        if self.total_points == 0:
            return 0.0
        return self.total_violations / self.total_points

    def merge(self, other: "SandwichReport") -> "SandwichReport":
        """Associative, commutative aggregation across paths."""
        if self.rel_tol != other.rel_tol:
            raise ValueError("cannot merge reports with different tolerances")
        return SandwichReport(
            self.x_below_lower + other.x_below_lower,
            self.x_above_upper + other.x_above_upper,
            self.y_below_lower + other.y_below_lower,
            self.y_above_upper + other.y_above_upper,
            self.total_points + other.total_points,
            max(self.worst_relative_violation, other.worst_relative_violation),
            self.rel_tol,
            self.ordering_violations + other.ordering_violations,
        )


def _species_bounds(model, noise, species, jln):
    """(upper, lower, exponent) for one species from the shared noise."""
    grid = noise.grid
    h = np.diff(grid)
    t_left = grid[:-1]
    arrays = _SpeciesArrays(model, species, t_left)
    dW = noise.dW1 if species == 1 else noise.dW2
    x0 = model.initial(species)

    # Exponent increments match the path stepper with the density-dependent
    # drift terms removed: (r - 0.5 a^2 - gamma mass) h + a dW, plus the jump
    # log terms.  E_pre is the left limit at each grid point.
    incr = arrays.drift_log * h + arrays.a * dW
    base = np.concatenate([[0.0], np.cumsum(incr)])
    E = base + np.cumsum(jln)
    E_pre = E - jln

    _, b, K, eps, _ = model.species(species)
    t = grid
    eps_t = np.broadcast_to(np.asarray(eps(t), float), t.shape)
    damp_upper = eps_t
    damp_lower = eps_t + np.broadcast_to(
        np.asarray(b(t), float) / np.asarray(K(t), float), t.shape
    )

    def trajectory(damp):
        # Denominator 1/x0 + integral e^{E(s)} damp(s) ds accumulated in log
        # space: E grows linearly in t so e^E alone would overflow on long
        # horizons.  Trapezoid cells use the pre-jump (left-limit) exponent
        # at their right endpoint and the post-jump value at their left.
        log_damp = np.log(damp)
        terms = np.log(0.5 * h) + np.logaddexp(
            E[:-1] + log_damp[:-1], E_pre[1:] + log_damp[1:]
        )
        log_den = np.logaddexp.accumulate(
            np.concatenate([[-np.log(x0)], terms])
        )
        return np.exp(E - log_den)

    upper = trajectory(damp_upper)
    lower = trajectory(damp_lower)
    return upper, lower, E


def bound_processes(model: ModelSpec, path: PathRecord) -> BoundTrajectories:
    """Compute the four comparison processes from the path's noise record.

    The comparison is pathwise (same realization), so the bounds consume the
    recorded increments and jumps rather than fresh noise.
    """
    noise = path.noise
    jln1 = jump_log_array(model, noise, 1)
    jln2 = jump_log_array(model, noise, 2)
    upper_x, lower_x, E1 = _species_bounds(model, noise, 1, jln1)
    upper_y, lower_y, E2 = _species_bounds(model, noise, 2, jln2)
    if np.any(lower_x > upper_x) or np.any(lower_y > upper_y):
        raise AssertionError("bound ordering violated; this is a bug")
    return BoundTrajectories(
        grid=noise.grid,
        upper_x=upper_x,
        lower_x=lower_x,
        upper_y=upper_y,
        lower_y=lower_y,
        exponent_x=E1,
        exponent_y=E2,
    )


def verify_sandwich(
    path: PathRecord, bounds: BoundTrajectories, rel_tol
) -> SandwichReport:
    """Count grid points where the state escapes its bounds beyond rel_tol.

    The tolerance absorbs the O(dt) discretization gap between the Euler path
    and the quadrature-based bounds; 10*dt is the calibrated default scale.
    """
    if path.positivity_violated:
        raise ValueError("positivity-violated paths are excluded from comparisons")
    if path.grid.shape != bounds.grid.shape or not np.array_equal(
        path.grid, bounds.grid
    ):
        raise ValueError("path and bounds grids do not match")

    def excess(low, value, high):
        below = (low - value) / low
        above = (value - high) / high
        return below, above

    xb, xa = excess(bounds.lower_x, path.x, bounds.upper_x)
    yb, ya = excess(bounds.lower_y, path.y, bounds.upper_y)
    worst = float(max(xb.max(), xa.max(), yb.max(), ya.max(), 0.0))
    ordering = int(
        np.count_nonzero(bounds.lower_x > bounds.upper_x)
        + np.count_nonzero(bounds.lower_y > bounds.upper_y)
    )
    return SandwichReport(
        x_below_lower=int(np.count_nonzero(xb > rel_tol)),
        x_above_upper=int(np.count_nonzero(xa > rel_tol)),
        y_below_lower=int(np.count_nonzero(yb > rel_tol)),
        y_above_upper=int(np.count_nonzero(ya > rel_tol)),
        total_points=int(path.grid.size),
        worst_relative_violation=worst,
        rel_tol=float(rel_tol),
        ordering_violations=ordering,
    )
