"""Compound-Poisson jump sampling and reproducible random streams.

Jumps arrive as a Poisson process with the mark table's total weight as its
rate; each event carries a mark label drawn with probability proportional to
its weight.  All randomness flows through counter-based Philox streams keyed
by (seed, stream id), so any path can be regenerated bit-identically in
isolation, regardless of scheduling or worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .coeffs import MarkTable, SCAN_POINTS, log_square_mass

_MASK64 = (1 << 64) - 1

# Per-path channels; stream_id = path_index * CHANNELS_PER_PATH + channel.
CHANNEL_W1 = 0
CHANNEL_W2 = 1
CHANNEL_JUMP_TIMES = 2
CHANNEL_JUMP_MARKS = 3
CHANNELS_PER_PATH = 8


@dataclass(frozen=True)
class RngStream:
    """A named, reproducible random stream.

    Identical (seed, stream_id) pairs reproduce identical draws; distinct
    stream ids give statistically independent streams (Philox counter mode).
    """

    seed: int
    stream_id: int

    def generator(self) -> Generator:
        key = ((self.seed & _MASK64) << 64) | (self.stream_id & _MASK64)
        return Generator(Philox(key=key))


@dataclass(frozen=True)
class PathStreams:
    """The four independent channels one simulated path consumes."""

    w1: RngStream
    w2: RngStream
    jump_times: RngStream
    jump_marks: RngStream


def path_streams(base_seed: int, path_index: int) -> PathStreams:
    """Streams for path ``path_index`` of an ensemble seeded by ``base_seed``."""
    if path_index < 0:
        raise ValueError("path_index must be nonnegative")
    base = path_index * CHANNELS_PER_PATH

    def stream(channel):
        return RngStream(base_seed, base + channel)

    return PathStreams(
        w1=stream(CHANNEL_W1),
        w2=stream(CHANNEL_W2),
        jump_times=stream(CHANNEL_JUMP_TIMES),
        jump_marks=stream(CHANNEL_JUMP_MARKS),
    )


@dataclass(frozen=True)
class JumpStream:
    """Time-sorted jump events over (0, horizon] with their mark labels."""

    times: np.ndarray
    mark_indices: np.ndarray
    horizon: float
    total_rate: float

    def __post_init__(self):
        object.__setattr__(self, "times", np.asarray(self.times, dtype=float))
        object.__setattr__(
            self, "mark_indices", np.asarray(self.mark_indices, dtype=np.int64)
        )
        if self.times.shape != self.mark_indices.shape:
            raise ValueError("times and mark_indices must align")
        if self.times.size:
            if self.times[0] <= 0.0 or self.times[-1] > self.horizon:
                raise ValueError("jump times must lie in (0, horizon]")
            if np.any(np.diff(self.times) <= 0.0):
                raise ValueError("jump times must be strictly increasing")

    @property
    def count(self) -> int:
        return int(self.times.size)


def sample_jumps(
    marks: MarkTable, horizon, time_rng: RngStream, mark_rng: RngStream
) -> JumpStream:
    """Draw one compound-Poisson jump stream over (0, horizon].

    Event times come from exponential inter-arrivals at the table's total
    weight (exact for a time-invariant jump measure); labels are drawn with
    probability weight/total.  Separate channels keep the two draws
    independent and individually reproducible.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    rate = marks.total_mass
    if rate == 0.0:
        return JumpStream(np.empty(0), np.empty(0, dtype=np.int64), horizon, 0.0)

    gen = time_rng.generator()
    block = max(16, int(1.5 * rate * horizon) + 16)
    gaps = gen.exponential(scale=1.0 / rate, size=block)
    times = np.cumsum(gaps)
    while times[-1] <= horizon:
        gaps = gen.exponential(scale=1.0 / rate, size=block)
        times = np.concatenate([times, times[-1] + np.cumsum(gaps)])
    times = times[times <= horizon]

    weights = marks.weights()
    labels = mark_rng.generator().choice(
        marks.n_marks, size=times.size, p=weights / rate
    )
    return JumpStream(times, labels.astype(np.int64), float(horizon), rate)


def log_jump_size(marks: MarkTable, species, t, mark_index) -> float:
    """log(1+gamma) applied to the log-state when this mark fires at time t."""
    gamma = marks.marks[mark_index].gamma(species)(t)
    return float(np.log1p(gamma))


def compensator_rates(marks: MarkTable, species, t):
    """(gamma mass, log mass) at time t.

    The gamma mass is the drift the compensated jump integral removes from
    the raw dynamics; the log mass is the drift rate of the compensated
    log-jump accumulator.  Both accept scalar or array t.
    """
    from .coeffs import gamma_mass, log_mass

    return gamma_mass(marks, species, t), log_mass(marks, species, t)


def jump_q_moment(marks: MarkTable, species, q, horizon=None) -> float:
    """sup over [0, horizon] of the weighted q-th absolute jump moment.

    This is the finiteness certificate required by the moment-boundedness
    check; it is exact for constant jump factors and a dense scan otherwise.
    """
    if q <= 0:
        raise ValueError("q must be positive")
    if marks.n_marks == 0:
        return 0.0

    def moment(t):
        total = 0.0
        for mark in marks.marks:
            total = total + mark.weight * np.abs(mark.gamma(species)(t)) ** q
        return total

    if all(m.gamma(species).is_constant for m in marks.marks):
        return float(moment(0.0))
    if horizon is None or horizon <= 0:
        raise ValueError("horizon required for time-varying jump factors")
    return float(np.max(moment(np.linspace(0.0, horizon, SCAN_POINTS))))


def log_square_rate_sup(marks: MarkTable, species, horizon=None) -> float:
    """sup over [0, horizon] of the weighted squared log-jump mass.

    Multiplied by t this bounds the quadratic variation of the compensated
    log-jump accumulator; martingale drift envelopes are sized from it.
    """
    if marks.n_marks == 0:
        return 0.0
    if all(m.gamma(species).is_constant for m in marks.marks):
        return float(log_square_mass(marks, species, 0.0))
    if horizon is None or horizon <= 0:
        raise ValueError("horizon required for time-varying jump factors")
    vals = log_square_mass(marks, species, np.linspace(0.0, horizon, SCAN_POINTS))
    return float(np.max(vals))
