"""Strong self-convergence of the two integration schemes.

One Brownian-plus-jump realization per path is viewed at nested step sizes;
endpoint RMS differences between successive levels reveal each scheme's
strong order: about sqrt(2) per halving for the direct-coordinate scheme
(order 1/2) and about 2 for the log-coordinate scheme (state-independent
diffusion, effectively order 1).
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import levymut as lm

model = lm.ModelSpec(
    r1=0.5, b1=1.0, K1=2.0, eps1=0.5,
    r2=0.5, b2=1.0, K2=2.0, eps2=0.5,
    alpha1=0.2, alpha2=0.2,
    marks=lm.MarkTable((lm.Mark(1.0, lm.Constant(0.1), lm.Constant(0.1)),)),
    x0=0.5, y0=0.5,
)

levels = (1.6e-2, 8e-3, 4e-3, 2e-3, 1e-3)
study = lm.convergence_study(model, levels, horizon=10.0, n_paths=150,
                             base_seed=55)

print(f"{'dt pair':>20} {'direct RMS':>12} {'log RMS':>12}")
for i in range(len(levels) - 1):
    pair = f"{levels[i]:g} -> {levels[i + 1]:g}"
    print(f"{pair:>20} {study.direct_rms[i]:12.3e} {study.log_rms[i]:12.3e}")
print("direct successive ratios:", np.round(study.direct_ratios, 3))
print("log successive ratios:   ", np.round(study.log_ratios, 3))
print("cross-scheme RMS per level:", np.round(study.cross_rms, 6))

coarse = np.array(levels[:-1])
plt.figure(figsize=(7, 5))
plt.loglog(coarse, study.direct_rms, "o-", label="direct scheme")
plt.loglog(coarse, study.log_rms, "s-", label="log scheme")
plt.loglog(coarse, study.direct_rms[-1] * (coarse / coarse[-1]) ** 0.5,
           "k--", lw=0.8, label="slope 1/2")
plt.loglog(coarse, study.log_rms[-1] * (coarse / coarse[-1]) ** 1.0,
           "k:", lw=0.8, label="slope 1")
plt.xlabel("dt")
plt.ylabel("RMS endpoint difference to next level")
plt.title("Strong self-convergence")
plt.legend()
plt.tight_layout()
plt.savefig("demo05_convergence.png", dpi=130)
print("saved demo05_convergence.png")
