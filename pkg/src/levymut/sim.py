"""Path simulation for the two-species mutualism model with jumps.

The canonical integrator steps the log-state on a jump-adapted grid (every
jump instant is a grid point), which makes positivity structural and applies
each jump exactly as a multiplicative factor.  A direct-coordinate Euler
scheme over the *same* noise is provided purely as a cross-check, and the
noise-free model reduces to the classical deterministic mutualism system,
whose interior equilibrium is computed here as an oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import coeffs as cf
from ._kernels import direct_euler_loop, log_euler_loop
from .coeffs import Coefficient, MarkTable, as_coefficient
from .levy import JumpStream, PathStreams, sample_jumps


class SimulationOverflowError(RuntimeError):
    """A path left the representable range (|log state| > 700)."""

    def __init__(self, time, u, v):
        super().__init__(
            f"state exploded at t={time:.6g} (log-state u={u:.3g}, v={v:.3g}); "
            "check coefficient positivity and step size"
        )
        self.time = time


@dataclass(frozen=True)
class ModelSpec:
    """Full parameter set: per-species growth r, mutualism strength b,
    capacity K, self-limitation eps, diffusion intensity alpha, a shared
    jump mark table, and the positive initial state."""

    r1: Coefficient
    b1: Coefficient
    K1: Coefficient
    eps1: Coefficient
    r2: Coefficient
    b2: Coefficient
    K2: Coefficient
    eps2: Coefficient
    alpha1: Coefficient = cf.Constant(0.0)
    alpha2: Coefficient = cf.Constant(0.0)
    marks: MarkTable = MarkTable()
    x0: float = 1.0
    y0: float = 1.0

    def __post_init__(self):
        for name in ("r1", "b1", "K1", "eps1", "r2", "b2", "K2", "eps2",
                     "alpha1", "alpha2"):
            object.__setattr__(self, name, as_coefficient(getattr(self, name)))
        for name in ("r1", "K1", "eps1", "r2", "K2", "eps2"):
            if getattr(self, name).envelope().inf <= 0.0:
                raise ValueError(f"{name} must stay strictly positive")
        # b may vanish (no mutualism coupling), which degenerates each species
        # to a stochastic logistic equation and makes the comparison bounds
        # coincide with the dynamics; alpha may vanish (no diffusion).
        for name in ("b1", "b2", "alpha1", "alpha2"):
            if getattr(self, name).envelope().inf < 0.0:
                raise ValueError(f"{name} must stay nonnegative")
        if not isinstance(self.marks, MarkTable):
            raise TypeError("marks must be a MarkTable")
        for name in ("x0", "y0"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite")

    def species(self, i):
        """(r, b, K, eps, alpha) for species i in {1, 2}."""
        if i == 1:
            return self.r1, self.b1, self.K1, self.eps1, self.alpha1
        if i == 2:
            return self.r2, self.b2, self.K2, self.eps2, self.alpha2
        raise ValueError("species must be 1 or 2")

    def initial(self, i):
        return self.x0 if i == 1 else self.y0


@dataclass(frozen=True)
class NoiseRecord:
    """The shared randomness of one path: jump-adapted grid, per-cell Brownian
    increments (variance = cell width), and the jump stream aligned to grid
    points.  Both the path and its comparison bounds consume this record."""

    grid: np.ndarray
    uniform: np.ndarray
    dW1: np.ndarray
    dW2: np.ndarray
    jumps: JumpStream
    jump_positions: np.ndarray

    @property
    def horizon(self) -> float:
        return float(self.grid[-1])

    @property
    def n_cells(self) -> int:
        return int(self.grid.size - 1)


@dataclass(frozen=True)
class PathRecord:
    """One simulated trajectory plus its accumulated martingale terms.

    M_i is the Brownian integral of alpha_i; Q_i is the compensated log-jump
    accumulator (jump log terms minus the running log-mass integral).
    """

    grid: np.ndarray
    x: np.ndarray
    y: np.ndarray
    u: np.ndarray
    v: np.ndarray
    M1: np.ndarray
    M2: np.ndarray
    Q1: np.ndarray
    Q2: np.ndarray
    noise: NoiseRecord
    positivity_violated: bool = False

    @property
    def horizon(self) -> float:
        return float(self.grid[-1])

    def state(self, species):
        return self.x if species == 1 else self.y


def uniform_grid(dt, horizon) -> np.ndarray:
    """{0, dt, 2dt, ...} up to and including horizon."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    n = int(round(horizon / dt))
    if n >= 1 and abs(n * dt - horizon) <= 1e-9 * max(1.0, horizon):
        pts = np.arange(n + 1) * dt
        pts[-1] = horizon
        return pts
    n = int(math.floor(horizon / dt))
    pts = np.arange(n + 1) * dt
    if pts[-1] < horizon:
        pts = np.append(pts, horizon)
    return pts


def build_grid(dt, horizon, jumps=None) -> np.ndarray:
    """Sorted union of the uniform grid and all jump times, duplicates merged.

    Every cell width is at most dt, and every jump instant is a grid point so
    jumps are applied exactly.
    """
    base = uniform_grid(dt, horizon)
    if jumps is None:
        return base
    times = jumps.times if isinstance(jumps, JumpStream) else np.asarray(jumps, float)
    if times.size == 0:
        return base
    if times.min() <= 0.0 or times.max() > horizon:
        raise ValueError("jump times must lie in (0, horizon]")
    return np.unique(np.concatenate([base, times]))


def sample_noise(marks: MarkTable, dt, horizon, streams: PathStreams) -> NoiseRecord:
    """Draw the full noise record one path consumes."""
    jumps = sample_jumps(marks, horizon, streams.jump_times, streams.jump_marks)
    uniform = uniform_grid(dt, horizon)
    grid = build_grid(dt, horizon, jumps)
    positions = np.searchsorted(grid, jumps.times)
    widths = np.diff(grid)
    scale = np.sqrt(widths)
    dW1 = streams.w1.generator().standard_normal(widths.size) * scale
    dW2 = streams.w2.generator().standard_normal(widths.size) * scale
    return NoiseRecord(grid, uniform, dW1, dW2, jumps, positions)


def restrict_noise(noise: NoiseRecord, factor: int) -> NoiseRecord:
    """The same Brownian path and jumps on a grid coarsened by ``factor``.

    The coarse uniform grid is a slice of the fine one, so grid points match
    bitwise and fine Brownian increments sum exactly into coarse cells.  This
    is what a strong self-convergence study needs: one underlying noise
    realization viewed at nested resolutions.
    """
    if factor < 1:
        raise ValueError("factor must be >= 1")
    if factor == 1:
        return noise
    if (noise.uniform.size - 1) % factor != 0:
        raise ValueError("uniform cell count must be divisible by factor")
    uniform = noise.uniform[::factor]
    if noise.jumps.times.size:
        grid = np.unique(np.concatenate([uniform, noise.jumps.times]))
    else:
        grid = uniform
    pos = np.searchsorted(noise.grid, grid)
    if not np.array_equal(noise.grid[pos], grid):
        raise ValueError("coarse grid is not a subset of the fine grid")
    dW1 = np.add.reduceat(noise.dW1, pos[:-1])
    dW2 = np.add.reduceat(noise.dW2, pos[:-1])
    positions = np.searchsorted(grid, noise.jumps.times)
    return NoiseRecord(grid, uniform, dW1, dW2, noise.jumps, positions)


def jump_log_array(model: ModelSpec, noise: NoiseRecord, species) -> np.ndarray:
    """log(1+gamma) per grid point (zero where no jump lands), with gamma
    evaluated at the jump's arrival time."""
    out = np.zeros(noise.grid.size)
    jumps = noise.jumps
    if jumps.count == 0:
        return out
    for k, mark in enumerate(model.marks.marks):
        sel = jumps.mark_indices == k
        if np.any(sel):
            gam = np.asarray(mark.gamma(species)(jumps.times[sel]), dtype=float)
            np.add.at(out, noise.jump_positions[sel], np.log1p(gam))
    return out


class _SpeciesArrays:
    """Coefficient values on the grid's left endpoints for one species."""

    __slots__ = ("drift_log", "drift_direct", "b", "K", "eps", "a", "lm")

    def __init__(self, model, species, t_left):
        r, b, K, eps, alpha = model.species(species)
        shape = t_left.shape
        self.b = np.broadcast_to(np.asarray(b(t_left), float), shape).copy()
        self.K = np.broadcast_to(np.asarray(K(t_left), float), shape).copy()
        self.eps = np.broadcast_to(np.asarray(eps(t_left), float), shape).copy()
        self.a = np.broadcast_to(np.asarray(alpha(t_left), float), shape).copy()
        rv = np.asarray(r(t_left), float)
        gm = np.asarray(cf.gamma_mass(model.marks, species, t_left), float)
        self.lm = np.broadcast_to(
            np.asarray(cf.log_mass(model.marks, species, t_left), float), shape
        ).copy()
        # The compensated-jump drift and the Ito correction recombine so the
        # stepper never evaluates log(1+gamma) in the drift.
        self.drift_log = np.broadcast_to(rv - 0.5 * self.a**2 - gm, shape).copy()
        self.drift_direct = np.broadcast_to(rv - gm, shape).copy()


def _martingale_accumulators(noise, arrays1, arrays2, jln1, jln2):
    h = np.diff(noise.grid)
    M1 = np.concatenate([[0.0], np.cumsum(arrays1.a * noise.dW1)])
    M2 = np.concatenate([[0.0], np.cumsum(arrays2.a * noise.dW2)])
    Q1 = np.cumsum(jln1) - np.concatenate([[0.0], np.cumsum(arrays1.lm * h)])
    Q2 = np.cumsum(jln2) - np.concatenate([[0.0], np.cumsum(arrays2.lm * h)])
    return M1, M2, Q1, Q2


def _prepare(model, dt, horizon, streams, noise):
    if noise is None:
        if streams is None or dt is None or horizon is None:
            raise ValueError("either a NoiseRecord or (dt, horizon, streams)")
        noise = sample_noise(model.marks, dt, horizon, streams)
    t_left = noise.grid[:-1]
    arrays1 = _SpeciesArrays(model, 1, t_left)
    arrays2 = _SpeciesArrays(model, 2, t_left)
    jln1 = jump_log_array(model, noise, 1)
    jln2 = jump_log_array(model, noise, 2)
    return noise, arrays1, arrays2, jln1, jln2


def simulate_path(
    model: ModelSpec, dt=None, horizon=None, streams=None, *, noise=None
) -> PathRecord:
    """Integrate the model in log coordinates on the jump-adapted grid.

    Coefficients are evaluated at the left endpoint of each cell (explicit
    scheme); a jump landing on a grid point is applied after that cell's
    diffusion step.  The state is strictly positive by construction.  A path
    whose log-state exceeds 700 in magnitude aborts with
    SimulationOverflowError rather than saturating.
    """
    noise, s1, s2, jln1, jln2 = _prepare(model, dt, horizon, streams, noise)
    h = np.diff(noise.grid)
    G = noise.grid.size
    u = np.empty(G)
    v = np.empty(G)
    u[0] = math.log(model.x0)
    v[0] = math.log(model.y0)
    status = log_euler_loop(
        u, v,
        s1.drift_log, s1.b, s1.K, s1.eps, s1.a, noise.dW1,
        s2.drift_log, s2.b, s2.K, s2.eps, s2.a, noise.dW2,
        h, jln1, jln2,
    )
    if status >= 0:
        raise SimulationOverflowError(
            noise.grid[status], u[status - 1], v[status - 1]
        )
    M1, M2, Q1, Q2 = _martingale_accumulators(noise, s1, s2, jln1, jln2)
    return PathRecord(
        grid=noise.grid, x=np.exp(u), y=np.exp(v), u=u, v=v,
        M1=M1, M2=M2, Q1=Q1, Q2=Q2, noise=noise,
    )


def simulate_direct(
    model: ModelSpec, dt=None, horizon=None, streams=None, *, noise=None
) -> PathRecord:
    """Euler on the raw coordinates over the same noise record.

    Used only as a convergence cross-check against simulate_path.  A step
    that drives the state nonpositive flags the path positivity-violated
    (expected at coarse dt) and the remainder of the record is NaN; such
    paths are excluded from comparisons.
    """
    noise, s1, s2, jln1, jln2 = _prepare(model, dt, horizon, streams, noise)
    h = np.diff(noise.grid)
    G = noise.grid.size
    x = np.empty(G)
    y = np.empty(G)
    x[0] = model.x0
    y[0] = model.y0
    status = direct_euler_loop(
        x, y,
        s1.drift_direct, s1.b, s1.K, s1.eps, s1.a, noise.dW1,
        s2.drift_direct, s2.b, s2.K, s2.eps, s2.a, noise.dW2,
        h, np.exp(jln1), np.exp(jln2),
    )
    violated = status >= 0
    if violated:
        x[status:] = np.nan
        y[status:] = np.nan
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.log(x)
        v = np.log(y)
    M1, M2, Q1, Q2 = _martingale_accumulators(noise, s1, s2, jln1, jln2)
    return PathRecord(
        grid=noise.grid, x=x, y=y, u=u, v=v,
        M1=M1, M2=M2, Q1=Q1, Q2=Q2, noise=noise,
        positivity_violated=violated,
    )


def _require_noise_free_constants(model: ModelSpec):
    if model.marks.n_marks != 0:
        raise ValueError("deterministic reduction requires an empty mark table")
    for name in ("alpha1", "alpha2"):
        if getattr(model, name).envelope().sup != 0.0:
            raise ValueError("deterministic reduction requires alpha == 0")
    values = {}
    for name in ("r1", "b1", "K1", "eps1", "r2", "b2", "K2", "eps2"):
        c = getattr(model, name)
        if not c.is_constant:
            raise ValueError(f"{name} must be constant")
        values[name] = float(c(0.0))
    return values


def deterministic_equilibrium(model: ModelSpec):
    """Interior equilibrium (x*, y*) of the noise-free constant model.

    Damped Newton from the single-species fixed points; the interior
    equilibrium is unique so this converges; residual below 1e-12.
    """
    p = _require_noise_free_constants(model)
    r1, b1, K1, e1 = p["r1"], p["b1"], p["K1"], p["eps1"]
    r2, b2, K2, e2 = p["r2"], p["b2"], p["K2"], p["eps2"]

    def residual(x, y):
        return np.array(
            [r1 - b1 * x / (K1 + y) - e1 * x, r2 - b2 * y / (K2 + x) - e2 * y]
        )

    x = r1 / (e1 + b1 / K1)
    y = r2 / (e2 + b2 / K2)
    F = residual(x, y)
    for _ in range(200):
        if np.max(np.abs(F)) < 1e-13:
            return float(x), float(y)
        J = np.array(
            [
                [-b1 / (K1 + y) - e1, b1 * x / (K1 + y) ** 2],
                [b2 * y / (K2 + x) ** 2, -b2 / (K2 + x) - e2],
            ]
        )
        step = np.linalg.solve(J, -F)
        s = 1.0
        norm0 = np.linalg.norm(F)
        while s > 1e-6:
            xn, yn = x + s * step[0], y + s * step[1]
            if xn > 0 and yn > 0:
                Fn = residual(xn, yn)
                if np.linalg.norm(Fn) < norm0:
                    x, y, F = xn, yn, Fn
                    break
            s *= 0.5
        else:
            raise RuntimeError("equilibrium line search stalled")
    if np.max(np.abs(F)) < 1e-12:
        return float(x), float(y)
    raise RuntimeError("equilibrium Newton iteration did not converge")
