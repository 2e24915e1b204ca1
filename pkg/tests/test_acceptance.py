"""Acceptance suite: one test per criterion, at the stated tolerances.

Each test prints a single PASS/FAIL line with its measured values (visible
with ``pytest -s`` or in captured output).  Heavy ensembles are session
cached so criteria sharing a configuration share one run.  All seeds are
fixed constants chosen up front.
"""

import math
import time

import numpy as np
import pytest

import levymut as lm
from conftest import make_baseline, make_extinct, make_unit_symmetric

GOLDEN = 0.6180339887498949  # positive root of 1 - x - x^2 = 0
LOG_1P1 = 0.09531017980432487

THREADS = 1  # single-CPU sandbox; determinism is thread-count independent


def report(number, name, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number} ({name}): {detail}"
    print(line)
    assert passed, line


def _timed_ensemble(*args, **kwargs):
    start = time.perf_counter()
    ens = lm.run_ensemble(*args, **kwargs)
    return ens, time.perf_counter() - start


@pytest.fixture(scope="session")
def sandwich_ensemble(baseline_model):
    # criterion 2: N=500, T=20, dt=1e-3, bounds from shared noise
    return _timed_ensemble(
        baseline_model, 1e-3, 20.0, 500, base_seed=1002,
        threads=THREADS, sandwich_rel_tol=1e-2,
    )


@pytest.fixture(scope="session")
def extinct_ensemble(extinct_model):
    # criterion 3: N=500, T=200, dt=1e-3
    return _timed_ensemble(
        extinct_model, 1e-3, 200.0, 500, base_seed=1003, threads=THREADS
    )


@pytest.fixture(scope="session")
def persistence_ensemble(baseline_model):
    # criterion 4: N=500, T=500, dt=1e-3
    return _timed_ensemble(
        baseline_model, 1e-3, 500.0, 500, base_seed=1004, threads=THREADS
    )


@pytest.fixture(scope="session")
def terminal_ensemble(baseline_model):
    # criteria 5 and 6 share this run: N=1000, T=200, dt=1e-3
    return lm.run_ensemble(
        baseline_model, 1e-3, 200.0, 1000, base_seed=1005, threads=THREADS
    )


@pytest.fixture(scope="session")
def martingale_ensemble(baseline_model):
    # criterion 7: N=1000, T=100, dt=1e-3
    return lm.run_ensemble(
        baseline_model, 1e-3, 100.0, 1000, base_seed=1007, threads=THREADS
    )


def test_criterion_01_deterministic_reduction():
    model = make_unit_symmetric(x0=0.5, y0=0.5)
    start = time.perf_counter()
    path = lm.simulate_path(model, 1e-3, 50.0, lm.path_streams(1001, 0))
    elapsed = time.perf_counter() - start
    target = lm.deterministic_equilibrium(model)
    assert target[0] == pytest.approx(GOLDEN, abs=1e-12)
    assert target[1] == pytest.approx(GOLDEN, abs=1e-12)
    err = max(abs(path.x[-1] - target[0]), abs(path.y[-1] - target[1]))
    report(
        1, "deterministic reduction",
        err < 1e-6 and elapsed < 5.0,
        f"terminal error {err:.3e} (tol 1e-6), runtime {elapsed:.2f}s (< 5s)",
    )


def test_criterion_02_pathwise_sandwich(sandwich_ensemble):
    ensemble, elapsed = sandwich_ensemble
    agg = ensemble.sandwich
    frac = agg.violation_fraction
    report(
        2, "pathwise sandwich",
        frac <= 1e-3 and agg.ordering_violations == 0 and elapsed < 120.0,
        f"violation fraction {frac:.2e} (tol 1e-3), worst excess "
        f"{agg.worst_relative_violation:.2e}, ordering violations "
        f"{agg.ordering_violations} (must be 0) over {agg.total_points} points, "
        f"runtime {elapsed:.0f}s (< 120s)",
    )


def test_criterion_03_extinction(extinct_model, extinct_ensemble):
    ensemble, elapsed = extinct_ensemble
    verdict = lm.classify_regime(extinct_model, 200.0)
    assert verdict.joint is lm.JointRegime.BOTH_EXTINCT
    assert verdict.species1.threshold_high == pytest.approx(-0.22, abs=1e-12)
    ok = elapsed < 600.0
    details = []
    for species, tag in ((1, "x"), (2, "y")):
        terminal = ensemble.terminal(species)
        frac = float(np.mean(terminal < 1e-3))
        median_slope = float(np.median(ensemble.log_slopes(species)))
        ok = ok and frac >= 0.95 and median_slope <= -0.15
        details.append(
            f"{tag}: P(terminal<1e-3)={frac:.3f} (>=0.95), "
            f"median log-slope {median_slope:.4f} (<= -0.15)"
        )
    details.append(f"runtime {elapsed:.0f}s (< 600s)")
    report(3, "extinction", ok, "; ".join(details))


def test_criterion_04_persistence_in_mean(baseline_model, persistence_ensemble):
    # lower bound (growth inf - penalty sup) / (b sup + eps sup * K inf),
    # computed here from first principles as the oracle
    ensemble, elapsed = persistence_ensemble
    horizon = 500.0
    ok = elapsed < 1200.0
    details = []
    for species, tag in ((1, "x"), (2, "y")):
        r, b, K, eps, alpha = baseline_model.species(species)
        penalty_sup = lm.beta_envelope(
            baseline_model.marks, alpha, species, horizon
        ).sup
        bound = (r.envelope(horizon).inf - penalty_sup) / (
            b.envelope(horizon).sup
            + eps.envelope(horizon).sup * K.envelope(horizon).inf
        )
        assert bound == pytest.approx(0.23765508990216245, rel=1e-12)
        assert bound == pytest.approx(
            lm.persistence_bounds(baseline_model, species, horizon).lower, rel=1e-12
        )
        averages = ensemble.terminal_time_average(species)
        frac = float(np.mean(averages >= 0.95 * bound))
        ok = ok and frac >= 0.95
        details.append(
            f"{tag}: P(avg >= 0.95*{bound:.5f}) = {frac:.3f} (>= 0.95), "
            f"mean avg {averages.mean():.4f}"
        )
    details.append(f"runtime {elapsed:.0f}s (< 1200s)")
    report(4, "persistence in mean", ok, "; ".join(details))


def test_criterion_05_moment_boundedness(terminal_ensemble):
    ok = True
    details = []
    for q in (0.5, 2.0):
        curves = lm.empirical_moment(terminal_ensemble, q)
        for species, tag in ((1, "x"), (2, "y")):
            mc = curves[species]
            ok = ok and mc.bounded
            details.append(
                f"E[{tag}^{q:g}] slope {mc.trailing_slope:+.2e} "
                f"(<= {mc.z_crit}*SE={mc.z_crit * mc.slope_se:.2e})"
            )
    report(5, "moment boundedness", ok, "; ".join(details))


def test_criterion_06_permanence(terminal_ensemble):
    probes = lm.permanence_probe(terminal_ensemble, epsilon=0.1,
                                 window=(180.0, 200.0))
    ok = True
    details = []
    for species, tag in ((1, "x"), (2, "y")):
        p = probes[species]
        ok = ok and p.applicable and p.zeta_lower_ci > 0.0 and p.mass_fraction >= 0.9
        details.append(
            f"{tag}: band [{p.zeta_lower:.4f}, {p.zeta_upper:.4f}], "
            f"99% CI lower {p.zeta_lower_ci:.4f} (> 0), "
            f"mass {p.mass_fraction:.4f} (>= 0.9)"
        )
    report(6, "permanence", ok, "; ".join(details))


def test_criterion_07_martingale_drift(baseline_model, martingale_ensemble):
    T, N = 100.0, 1000
    alpha_sup = 0.2
    diffusion_env = 3.0 * alpha_sup / math.sqrt(T * N)
    jump_env = 3.0 * math.sqrt(1.0 * LOG_1P1**2 / (T * N))
    m1, m2, q1, q2 = martingale_ensemble.martingale_ratios()
    ok = (
        abs(m1) <= diffusion_env
        and abs(m2) <= diffusion_env
        and abs(q1) <= jump_env
        and abs(q2) <= jump_env
    )
    report(
        7, "martingale drift", ok,
        f"|mean M/T| = ({abs(m1):.2e}, {abs(m2):.2e}) <= {diffusion_env:.2e}; "
        f"|mean Q/T| = ({abs(q1):.2e}, {abs(q2):.2e}) <= {jump_env:.2e}",
    )


def test_criterion_08_scheme_convergence(baseline_model):
    study = lm.convergence_study(
        baseline_model, (4e-3, 2e-3, 1e-3), 10.0, 200, base_seed=1008,
        threads=THREADS,
    )
    assert study.n_excluded == 0
    ratios = study.direct_ratios
    ok = bool(np.all((ratios >= 1.2) & (ratios <= 1.7)))
    report(
        8, "scheme convergence", ok,
        f"direct-scheme successive RMS {study.direct_rms.tolist()} -> "
        f"ratio {ratios.tolist()} in [1.2, 1.7]",
    )


def test_criterion_09_determinism(tmp_path):
    scenario = """
[model]
r1 = 0.5
b1 = 1.0
K1 = 2.0
eps1 = 0.5
r2 = 0.5
b2 = 1.0
K2 = 2.0
eps2 = 0.5
alpha1 = 0.2
alpha2 = 0.2
x0 = 0.5
y0 = 0.5

[[model.marks]]
weight = 1.0
gamma1 = 0.1
gamma2 = 0.1

[run]
dt = 1e-2
horizon = 4.0
n_paths = 16
base_seed = 1009

[checks]
regime = true
sandwich = { rel_tol = 1e-1 }
extinction = true
persistence = true
moments = [0.5, 2.0]
"""
    from levymut.cli import main

    src = tmp_path / "scenario.toml"
    src.write_text(scenario, encoding="utf-8")

    def run(tag, threads):
        out = tmp_path / tag
        code = main(
            ["verify", "--scenario", str(src), "--out-dir", str(out),
             "--threads", str(threads)]
        )
        assert code == 0
        return {
            f.name: f.read_bytes() for f in sorted(out.iterdir()) if f.is_file()
        }

    first = run("a", 1)
    again = run("b", 1)
    wide = run("c", 8)
    ok = first == again == wide and len(first) >= 3
    report(
        9, "determinism",
        ok,
        f"{len(first)} files byte-identical across repeat runs and "
        f"1 vs 8 worker threads",
    )
