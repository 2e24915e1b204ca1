"""Ensembles on both sides of the noise threshold.

The same model with weak noise persists (positive quantile band, vanishing
log slope) and with strong noise dies out (terminal states collapse, log
slope pinned near growth - penalty < 0).
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import levymut as lm


def model_for(r, alpha):
    return lm.ModelSpec(
        r1=r, b1=1.0, K1=2.0, eps1=0.5,
        r2=r, b2=1.0, K2=2.0, eps2=0.5,
        alpha1=alpha, alpha2=alpha,
        x0=0.5, y0=0.5,
    )


T, N = 80.0, 200
persistent = model_for(0.5, 0.2)
extinct = model_for(0.1, 0.8)

runs = {}
for name, model in (("persistent", persistent), ("extinct", extinct)):
    verdict = lm.classify_regime(model, T)
    ens = lm.run_ensemble(model, 1e-2, T, N, base_seed=33)
    slopes = ens.log_slopes(1)
    runs[name] = (ens, slopes)
    print(
        f"{name}: joint case {verdict.joint.value}, "
        f"median x(T) = {np.median(ens.terminal(1)):.3g}, "
        f"median log-slope = {np.median(slopes):+.4f} "
        f"(threshold band [{verdict.species1.threshold_low:+.3f}, "
        f"{verdict.species1.threshold_high:+.3f}])"
    )

fig, axes = plt.subplots(1, 2, figsize=(11, 4.5))
for name, color in (("persistent", "C0"), ("extinct", "C3")):
    ens, slopes = runs[name]
    axes[0].plot(ens.report_times, ens.quantile_curve(1, 0.5), color=color,
                 label=f"{name} median")
    axes[0].fill_between(ens.report_times, ens.quantile_curve(1, 0.05),
                         ens.quantile_curve(1, 0.95), color=color, alpha=0.2)
    axes[1].hist(slopes, bins=30, color=color, alpha=0.6, label=name)
axes[0].set_yscale("log")
axes[0].set_xlabel("t")
axes[0].set_ylabel("x (log scale)")
axes[0].set_title("5-95% quantile fans")
axes[0].legend()
axes[1].axvline(0.0, color="k", lw=0.8)
axes[1].set_xlabel("ln x(T) / T")
axes[1].set_title("terminal log slopes")
axes[1].legend()
fig.tight_layout()
fig.savefig("demo03_extinction_vs_persistence.png", dpi=130)
print("saved demo03_extinction_vs_persistence.png")
