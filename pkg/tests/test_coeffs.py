import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import levymut as lm
from levymut.coeffs import SCAN_POINTS, beta, beta_envelope, log_square_mass

# Frozen scalar oracles (evaluated once with the math library and pinned):
LOG_1P1 = 0.09531017980432487        # log(1.1)
LOG_HALF = -0.6931471805599453       # log(0.5)
BETA_SINGLE_MARK = 0.00468982019567514          # 0.1 - log(1.1)
BETA_ALPHA_AND_MARK = 0.4062943611198906        # 0.02 + 2*(-0.5 - log(0.5))


def test_eval_constant():
    assert lm.eval_coefficient(lm.Constant(0.5), 7.3) == 0.5


def test_eval_sinusoid_quarter_period():
    c = lm.Sinusoid(mean=1.0, amplitude=0.3, angular_frequency=2 * math.pi)
    assert lm.eval_coefficient(c, 0.25) == pytest.approx(1.3, abs=1e-12)


def test_eval_table_midpoint():
    c = lm.Table(knots=(0.0, 1.0), values=(0.2, 0.4))
    assert lm.eval_coefficient(c, 0.5) == pytest.approx(0.3, abs=1e-15)


def test_table_extrapolates_constant():
    c = lm.Table(knots=(1.0, 2.0), values=(0.2, 0.4))
    assert c(0.0) == 0.2
    assert c(5.0) == 0.4


def test_eval_vectorized_matches_scalar():
    c = lm.Sinusoid(mean=2.0, amplitude=0.5, angular_frequency=3.0, phase=0.7)
    t = np.linspace(0, 5, 17)
    vec = c(t)
    assert vec.shape == t.shape
    for ti, vi in zip(t, vec):
        assert vi == c(float(ti))


def test_envelope_constant():
    assert lm.envelope(lm.Constant(0.5), 10.0) == lm.Envelope(0.5, 0.5)


def test_envelope_sinusoid_full_period():
    c = lm.Sinusoid(mean=1.0, amplitude=0.3, angular_frequency=2 * math.pi)
    assert lm.envelope(c, 1.0) == lm.Envelope(0.7, 1.3)
    assert lm.envelope(c, 100.0) == lm.Envelope(0.7, 1.3)


def test_envelope_sinusoid_partial_period_scans():
    c = lm.Sinusoid(mean=1.0, amplitude=0.3, angular_frequency=2 * math.pi)
    env = lm.envelope(c, 0.25)
    assert env.inf == pytest.approx(1.0, abs=1e-6)
    assert env.sup == pytest.approx(1.3, abs=1e-6)


def test_envelope_table_extremes_at_knots():
    c = lm.Table(knots=(0.0, 1.0, 2.0), values=(0.2, 0.4, 0.3))
    assert lm.envelope(c, 5.0) == lm.Envelope(0.2, 0.4)


def test_invalid_structures_rejected():
    with pytest.raises(ValueError):
        lm.Sinusoid(mean=1.0, amplitude=-0.1, angular_frequency=1.0)
    with pytest.raises(ValueError):
        lm.Table(knots=(1.0, 0.5), values=(0.1, 0.2))
    with pytest.raises(ValueError):
        lm.Table(knots=(0.0, 1.0), values=(0.1,))
    with pytest.raises(ValueError):
        lm.Envelope(2.0, 1.0)


def test_mark_table_rejects_jump_factor_at_minus_one():
    with pytest.raises(ValueError, match="must exceed -1"):
        lm.MarkTable((lm.Mark(1.0, lm.Constant(-1.5), lm.Constant(0.0)),))
    with pytest.raises(ValueError, match="must exceed -1"):
        lm.MarkTable((lm.Mark(1.0, lm.Constant(0.1), lm.Constant(-1.0)),))


def test_mark_weight_must_be_positive():
    with pytest.raises(ValueError):
        lm.Mark(0.0, lm.Constant(0.1), lm.Constant(0.1))


def test_beta_diffusion_only():
    marks = lm.MarkTable()
    assert beta(marks, lm.Constant(0.2), 1, 3.0) == pytest.approx(0.02, abs=1e-15)


def test_beta_single_mark_frozen_value():
    marks = lm.MarkTable((lm.Mark(1.0, lm.Constant(0.1), lm.Constant(0.1)),))
    got = beta(marks, lm.Constant(0.0), 1, 0.0)
    assert got == pytest.approx(BETA_SINGLE_MARK, rel=1e-13)


def test_beta_alpha_and_negative_mark_frozen_value():
    marks = lm.MarkTable((lm.Mark(2.0, lm.Constant(-0.5), lm.Constant(-0.5)),))
    got = beta(marks, lm.Constant(0.2), 2, 1.0)
    assert got == pytest.approx(BETA_ALPHA_AND_MARK, rel=1e-13)


def test_beta_envelope_all_constant_exact():
    env = beta_envelope(lm.MarkTable(), lm.Constant(0.2), 1, 10.0)
    assert env.inf == env.sup == pytest.approx(0.02, abs=1e-15)


def test_beta_envelope_sinusoidal_alpha():
    alpha = lm.Sinusoid(mean=0.2, amplitude=0.1, angular_frequency=2 * math.pi)
    env = beta_envelope(lm.MarkTable(), alpha, 1, 10.0)
    assert env.inf == pytest.approx(0.005, abs=1e-6)
    assert env.sup == pytest.approx(0.045, abs=1e-6)


def test_beta_envelope_constant_mark():
    marks = lm.MarkTable((lm.Mark(1.0, lm.Constant(0.1), lm.Constant(0.1)),))
    env = beta_envelope(marks, lm.Constant(0.0), 1, 10.0)
    assert env.inf == pytest.approx(BETA_SINGLE_MARK, rel=1e-13)
    assert env.sup == pytest.approx(BETA_SINGLE_MARK, rel=1e-13)


def test_beta_dominates_half_alpha_squared():
    marks = lm.MarkTable(
        (
            lm.Mark(1.0, lm.Constant(0.3), lm.Constant(-0.2)),
            lm.Mark(0.5, lm.Constant(-0.6), lm.Constant(1.5)),
        )
    )
    alpha = lm.Sinusoid(mean=0.3, amplitude=0.1, angular_frequency=1.0)
    t = np.linspace(0.0, 20.0, 501)
    for species in (1, 2):
        b = beta(marks, alpha, species, t)
        assert np.all(b >= 0.5 * np.asarray(alpha(t)) ** 2 - 1e-15)


def test_beta_equals_half_alpha_squared_iff_gamma_zero():
    zero_marks = lm.MarkTable((lm.Mark(2.0, lm.Constant(0.0), lm.Constant(0.0)),))
    assert beta(zero_marks, lm.Constant(0.4), 1, 5.0) == pytest.approx(0.08, abs=1e-15)
    live = lm.MarkTable((lm.Mark(2.0, lm.Constant(0.05), lm.Constant(0.0)),))
    assert beta(live, lm.Constant(0.4), 1, 5.0) > 0.08


def test_beta_monotone_in_jump_magnitude():
    # Single mark: moving gamma away from zero in either direction never
    # decreases the penalty.
    gammas = np.concatenate([np.linspace(-0.95, 0.0, 40), np.linspace(0.0, 5.0, 40)])
    vals = []
    for g in gammas:
        marks = lm.MarkTable((lm.Mark(1.0, lm.Constant(float(g)), lm.Constant(0.0)),))
        vals.append(beta(marks, lm.Constant(0.0), 1, 0.0))
    vals = np.array(vals)
    neg = vals[gammas <= 0]
    pos = vals[gammas >= 0]
    assert np.all(np.diff(neg) <= 1e-15)  # decreasing toward gamma=0
    assert np.all(np.diff(pos) >= -1e-15)  # increasing away from gamma=0


def test_log_square_mass_matches_scalar():
    marks = lm.MarkTable((lm.Mark(1.5, lm.Constant(0.1), lm.Constant(0.1)),))
    assert log_square_mass(marks, 1, 0.0) == pytest.approx(
        1.5 * LOG_1P1**2, rel=1e-13
    )


coefficients = st.one_of(
    st.builds(lm.Constant, st.floats(0.01, 10.0)),
    st.builds(
        lm.Sinusoid,
        mean=st.floats(0.5, 5.0),
        amplitude=st.floats(0.0, 0.45),
        angular_frequency=st.floats(-20.0, 20.0),
        phase=st.floats(-3.2, 3.2),
    ),
    st.builds(
        lm.Table,
        knots=st.just((0.0, 1.0, 2.5, 4.0)),
        values=st.tuples(*[st.floats(0.1, 5.0)] * 4),
    ),
)


@settings(max_examples=60, deadline=None)
@given(c=coefficients, t=st.floats(0.0, 10.0))
def test_envelope_contains_evaluation(c, t):
    horizon = 10.0
    env = lm.envelope(c, horizon)
    # Scanned envelopes (sinusoid with period > horizon) can miss an extremum
    # between scan points by at most half a scan step times the max slope.
    slack = 1e-12
    if isinstance(c, lm.Sinusoid):
        slack += (
            0.5 * c.amplitude * abs(c.angular_frequency) * horizon / (SCAN_POINTS - 1)
        )
    value = c(t)
    assert env.inf - slack <= value <= env.sup + slack
