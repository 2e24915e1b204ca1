import math

import numpy as np
import pytest

import levymut as lm
from levymut.levy import RngStream, log_square_rate_sup

LOG_1P1 = 0.09531017980432487
LOG_HALF = -0.6931471805599453

SINGLE_MARK = lm.MarkTable((lm.Mark(1.0, lm.Constant(0.1), lm.Constant(0.1)),))
TWO_MARKS = lm.MarkTable(
    (
        lm.Mark(1.0, lm.Constant(0.1), lm.Constant(0.1)),
        lm.Mark(2.0, lm.Constant(-0.5), lm.Constant(-0.5)),
    )
)


def test_rng_stream_reproducible():
    a = RngStream(123, 5).generator().standard_normal(16)
    b = RngStream(123, 5).generator().standard_normal(16)
    assert np.array_equal(a, b)


def test_rng_streams_distinct():
    a = RngStream(123, 5).generator().standard_normal(16)
    b = RngStream(123, 6).generator().standard_normal(16)
    c = RngStream(124, 5).generator().standard_normal(16)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_path_streams_have_distinct_channels():
    s = lm.path_streams(7, 3)
    ids = {s.w1.stream_id, s.w2.stream_id, s.jump_times.stream_id,
           s.jump_marks.stream_id}
    assert len(ids) == 4
    other = lm.path_streams(7, 4)
    assert ids.isdisjoint(
        {other.w1.stream_id, other.w2.stream_id, other.jump_times.stream_id,
         other.jump_marks.stream_id}
    )


def test_sample_jumps_empty_table():
    s = lm.path_streams(0, 0)
    jumps = lm.sample_jumps(lm.MarkTable(), 10.0, s.jump_times, s.jump_marks)
    assert jumps.count == 0
    assert jumps.total_rate == 0.0


def test_sample_jumps_deterministic():
    s = lm.path_streams(42, 1)
    j1 = lm.sample_jumps(TWO_MARKS, 50.0, s.jump_times, s.jump_marks)
    j2 = lm.sample_jumps(TWO_MARKS, 50.0, s.jump_times, s.jump_marks)
    assert np.array_equal(j1.times, j2.times)
    assert np.array_equal(j1.mark_indices, j2.mark_indices)
    assert j1.count > 0


def test_sample_jumps_times_valid():
    s = lm.path_streams(9, 2)
    jumps = lm.sample_jumps(TWO_MARKS, 30.0, s.jump_times, s.jump_marks)
    assert jumps.times[0] > 0.0
    assert jumps.times[-1] <= 30.0
    assert np.all(np.diff(jumps.times) > 0)


def test_sample_jumps_poisson_count_statistics():
    # total rate 3, horizon 10 -> Poisson(30) counts; mean over 10^4 streams
    # must sit inside the 3-sigma band [30 - 3*sqrt(30/1e4), 30 + ...].
    horizon, n_streams = 10.0, 10_000
    rate = TWO_MARKS.total_mass
    counts = np.empty(n_streams)
    for j in range(n_streams):
        s = lm.path_streams(2024, j)
        counts[j] = lm.sample_jumps(TWO_MARKS, horizon, s.jump_times, s.jump_marks).count
    target = rate * horizon
    band = 3.0 * math.sqrt(target / n_streams)
    assert abs(counts.mean() - target) <= band
    # variance of a Poisson count equals its mean; allow a 3-sigma band for
    # the variance estimator (~ sqrt(2/n)*var wide for near-normal counts)
    assert abs(counts.var() - target) <= 3.0 * target * math.sqrt(2.0 / n_streams) * 1.5


def test_sample_jumps_mark_frequencies():
    # weights 1 and 2 -> probabilities 1/3 and 2/3, multinomial 3-sigma band
    horizon, n_streams = 20.0, 2_000
    total = np.zeros(2)
    n_events = 0
    for j in range(n_streams):
        s = lm.path_streams(77, j)
        jumps = lm.sample_jumps(TWO_MARKS, horizon, s.jump_times, s.jump_marks)
        total += np.bincount(jumps.mark_indices, minlength=2)
        n_events += jumps.count
    for k, p in enumerate((1.0 / 3.0, 2.0 / 3.0)):
        sigma = math.sqrt(n_events * p * (1 - p))
        assert abs(total[k] - n_events * p) <= 3.0 * sigma


def test_log_jump_size_frozen_values():
    zero = lm.MarkTable((lm.Mark(1.0, lm.Constant(0.0), lm.Constant(0.0)),))
    assert lm.log_jump_size(zero, 1, 0.0, 0) == 0.0
    assert lm.log_jump_size(SINGLE_MARK, 1, 2.0, 0) == pytest.approx(
        LOG_1P1, rel=1e-14
    )
    neg = lm.MarkTable((lm.Mark(1.0, lm.Constant(-0.5), lm.Constant(-0.5)),))
    assert lm.log_jump_size(neg, 2, 0.0, 0) == pytest.approx(LOG_HALF, rel=1e-14)


def test_compensator_rates_frozen_values():
    assert lm.compensator_rates(lm.MarkTable(), 1, 0.0) == (0.0, 0.0)
    gm, lmass = lm.compensator_rates(SINGLE_MARK, 1, 0.0)
    assert gm == pytest.approx(0.1, rel=1e-14)
    assert lmass == pytest.approx(LOG_1P1, rel=1e-14)
    gm, lmass = lm.compensator_rates(TWO_MARKS, 2, 0.0)
    assert gm == pytest.approx(-0.9, rel=1e-14)
    assert lmass == pytest.approx(-1.2909841813155658, rel=1e-14)


def test_jump_q_moment_frozen_values():
    assert lm.jump_q_moment(lm.MarkTable(), 1, 2.0) == 0.0
    assert lm.jump_q_moment(SINGLE_MARK, 1, 2.0) == pytest.approx(0.01, rel=1e-14)
    assert lm.jump_q_moment(TWO_MARKS, 1, 1.0) == pytest.approx(1.1, rel=1e-14)
    with pytest.raises(ValueError):
        lm.jump_q_moment(SINGLE_MARK, 1, 0.0)


def test_jump_q_moment_time_varying_scan():
    marks = lm.MarkTable(
        (lm.Mark(1.0, lm.Sinusoid(0.1, 0.05, 2 * math.pi), lm.Constant(0.0)),)
    )
    got = lm.jump_q_moment(marks, 1, 2.0, horizon=10.0)
    assert got == pytest.approx(0.15**2, abs=1e-6)


def test_log_square_rate_sup():
    assert log_square_rate_sup(SINGLE_MARK, 1) == pytest.approx(
        LOG_1P1**2, rel=1e-13
    )
    assert log_square_rate_sup(lm.MarkTable(), 1) == 0.0


def test_compensated_accumulator_is_centered():
    # Q(T) built straight from the stream: sum of log(1.1) at events minus
    # rate * log(1.1) * T.  Its ensemble mean must vanish within 3 standard
    # errors (variance rate = weight * log(1.1)^2).
    horizon, n_streams = 10.0, 4_000
    qs = np.empty(n_streams)
    for j in range(n_streams):
        s = lm.path_streams(5150, j)
        jumps = lm.sample_jumps(SINGLE_MARK, horizon, s.jump_times, s.jump_marks)
        qs[j] = jumps.count * LOG_1P1 - 1.0 * LOG_1P1 * horizon
    se = math.sqrt(LOG_1P1**2 * 1.0 * horizon / n_streams)
    assert abs(qs.mean()) <= 3.0 * se
