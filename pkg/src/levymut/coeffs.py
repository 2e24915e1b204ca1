"""Time-varying model coefficients, their envelopes, and the noise penalty.

Every rate entering the model is a bounded, continuous function of time
represented by one of three variants: a constant, a sinusoid, or a piecewise
linear table.  Each variant knows its own infimum/supremum envelope, which is
what all persistence/extinction thresholds are computed from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Dense-scan resolution used whenever an envelope cannot be written down
# analytically.  The sup may be underestimated by O(range/SCAN_POINTS); every
# threshold test in this package keeps a margin wider than that.
SCAN_POINTS = 10_001


@dataclass(frozen=True)
class Envelope:
    """Infimum and supremum of a function of time over the horizon."""

    inf: float
    sup: float

    def __post_init__(self):
        if not (math.isfinite(self.inf) and math.isfinite(self.sup)):
            raise ValueError("envelope must be finite")
        if self.inf > self.sup:
            raise ValueError(f"envelope inf {self.inf} exceeds sup {self.sup}")

    @property
    def width(self):
        return self.sup - self.inf


class Coefficient:
    """Base class for positive, bounded, continuous functions of time.

    Subclasses implement scalar/array evaluation and an exact or scanned
    envelope.  Sign constraints are *not* enforced here: growth rates must be
    positive, noise intensities nonnegative and jump factors only need to
    stay above -1, so each consumer validates the envelope it requires.
    """

    def __call__(self, t):
        raise NotImplementedError

    def envelope(self, horizon=None) -> Envelope:
        """Envelope over [0, horizon]; ``None`` means the global envelope.

        All supported variants attain their global extremes within one
        period or within the knot span, so the global envelope is always
        available.
        """
        raise NotImplementedError

    @property
    def is_constant(self) -> bool:
        return False


@dataclass(frozen=True)
class Constant(Coefficient):
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("constant coefficient must be finite")

    def __call__(self, t):
        if np.ndim(t) == 0:
            return self.value
        return np.full(np.shape(t), self.value)

    def envelope(self, horizon=None):
        return Envelope(self.value, self.value)

    @property
    def is_constant(self):
        return True


@dataclass(frozen=True)
class Sinusoid(Coefficient):
    """mean + amplitude * sin(angular_frequency * t + phase)."""

    mean: float
    amplitude: float
    angular_frequency: float
    phase: float = 0.0

    def __post_init__(self):
        for name in ("mean", "amplitude", "angular_frequency", "phase"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"sinusoid {name} must be finite")
        if self.amplitude < 0:
            raise ValueError("sinusoid amplitude must be nonnegative")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = self.mean + self.amplitude * np.sin(
            self.angular_frequency * t + self.phase
        )
        return float(out) if out.ndim == 0 else out

    @property
    def period(self):
        if self.angular_frequency == 0.0:
            return 0.0
        return 2.0 * math.pi / abs(self.angular_frequency)

    def envelope(self, horizon=None):
        if self.amplitude == 0.0:
            return Envelope(self.mean, self.mean)
        if self.angular_frequency == 0.0:
            v = self.mean + self.amplitude * math.sin(self.phase)
            return Envelope(v, v)
        if horizon is None or horizon >= self.period:
            return Envelope(self.mean - self.amplitude, self.mean + self.amplitude)
        vals = self(np.linspace(0.0, horizon, SCAN_POINTS))
        return Envelope(float(vals.min()), float(vals.max()))

    @property
    def is_constant(self):
        return self.amplitude == 0.0 or self.angular_frequency == 0.0


@dataclass(frozen=True)
class Table(Coefficient):
    """Linear interpolation between knots, constant beyond the ends."""

    knots: tuple
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "knots", tuple(float(k) for k in self.knots))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.knots) == 0:
            raise ValueError("table needs at least one knot")
        if len(self.knots) != len(self.values):
            raise ValueError("table knots and values must have equal length")
        if any(b <= a for a, b in zip(self.knots, self.knots[1:])):
            raise ValueError("table knots must be strictly increasing")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("table values must be finite")

    def __call__(self, t):
        out = np.interp(t, self.knots, self.values)
        return float(out) if np.ndim(t) == 0 else out

    def envelope(self, horizon=None):
        # Linear interpolation attains its extremes at the knots.
        return Envelope(min(self.values), max(self.values))

    @property
    def is_constant(self):
        return len(set(self.values)) == 1


def as_coefficient(spec) -> Coefficient:
    """Coerce a number into a Constant; pass Coefficient instances through."""
    if isinstance(spec, Coefficient):
        return spec
    return Constant(float(spec))


def eval_coefficient(c: Coefficient, t):
    """Evaluate ``c`` at time(s) ``t >= 0``."""
    return c(t)


def envelope(c: Coefficient, horizon=None) -> Envelope:
    """Envelope of ``c`` over [0, horizon] (global when horizon is None)."""
    return c.envelope(horizon)


@dataclass(frozen=True)
class Mark:
    """One jump type: arrival weight plus per-species relative jump factors."""

    weight: float
    gamma1: Coefficient
    gamma2: Coefficient

    def __post_init__(self):
        if not (math.isfinite(self.weight) and self.weight > 0):
            raise ValueError("mark weight must be positive and finite")

    def gamma(self, species) -> Coefficient:
        return self.gamma1 if species == 1 else self.gamma2


@dataclass(frozen=True)
class MarkTable:
    """Finite list of jump marks; the total weight is the jump arrival rate.

    Validity requires every jump factor to stay strictly above -1 so the
    post-jump state 1+gamma remains positive, which also keeps all weighted
    log-jump masses finite.
    """

    marks: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "marks", tuple(self.marks))
        for i, mark in enumerate(self.marks):
            if not isinstance(mark, Mark):
                raise TypeError(f"marks[{i}] is not a Mark")
            for species in (1, 2):
                env = mark.gamma(species).envelope()
                if env.inf <= -1.0:
                    raise ValueError(
                        f"marks[{i}] gamma{species}: jump factor must exceed -1"
                    )

    @property
    def total_mass(self) -> float:
        return float(sum(m.weight for m in self.marks))

    @property
    def n_marks(self) -> int:
        return len(self.marks)

    def weights(self):
        return np.array([m.weight for m in self.marks], dtype=float)

    def gammas(self, species):
        return [m.gamma(species) for m in self.marks]


def _mark_sum(marks: MarkTable, species, t, transform):
    """Sum of weight * transform(gamma(t)) over marks; scalar or array t."""
    scalar = np.ndim(t) == 0
    total = 0.0 if scalar else np.zeros(np.shape(t))
    for mark in marks.marks:
        g = mark.gamma(species)(t)
        total = total + mark.weight * transform(g)
    return total


def gamma_mass(marks: MarkTable, species, t):
    """Weighted sum of the raw jump factors at time t."""
    return _mark_sum(marks, species, t, lambda g: g)


def log_mass(marks: MarkTable, species, t):
    """Weighted sum of log(1+gamma) at time t (the jump-log compensator rate)."""
    return _mark_sum(marks, species, t, np.log1p)


def log_square_mass(marks: MarkTable, species, t):
    """Weighted sum of log(1+gamma)^2 at time t.

    This is the quadratic-variation rate of the compensated log-jump
    accumulator, used to size martingale noise envelopes.
    """
    return _mark_sum(marks, species, t, lambda g: np.log1p(g) ** 2)


def beta(marks: MarkTable, alpha: Coefficient, species, t):
    """Effective noise penalty 0.5*alpha(t)^2 + sum w*(gamma - log(1+gamma)).

    The jump part is nonnegative (gamma - log(1+gamma) >= 0 for gamma > -1),
    so beta(t) >= 0.5*alpha(t)^2 with equality iff every gamma vanishes at t.
    """
    diffusion = 0.5 * np.asarray(alpha(t), dtype=float) ** 2
    jump = _mark_sum(marks, species, t, lambda g: g - np.log1p(g))
    out = diffusion + jump
    return float(out) if np.ndim(t) == 0 else out


def _all_constant(marks: MarkTable, alpha: Coefficient, species) -> bool:
    if not alpha.is_constant:
        return False
    return all(m.gamma(species).is_constant for m in marks.marks)


def beta_envelope(marks: MarkTable, alpha: Coefficient, species, horizon) -> Envelope:
    """Envelope of the noise penalty over [0, horizon].

    Exact when every component is constant in time; otherwise a dense grid
    scan (SCAN_POINTS evaluations), which can underestimate the sup by
    O(horizon/SCAN_POINTS) — threshold tests must keep a wider margin.
    """
    if horizon is None or horizon <= 0:
        raise ValueError("horizon must be positive")
    if _all_constant(marks, alpha, species):
        v = beta(marks, alpha, species, 0.0)
        return Envelope(v, v)
    vals = beta(marks, alpha, species, np.linspace(0.0, horizon, SCAN_POINTS))
    return Envelope(float(vals.min()), float(vals.max()))
