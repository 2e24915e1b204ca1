"""How the noise penalty decides the long-run fate of a species.

Sweeps the diffusion intensity and tracks the threshold margins
growth_inf - penalty_sup (persistence) and growth_sup - penalty_inf
(extinction).  Between the two sign changes the classification is honestly
indeterminate.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

import levymut as lm

marks = lm.MarkTable((lm.Mark(1.0, lm.Constant(0.1), lm.Constant(0.1)),))


def model_for(alpha):
    return lm.ModelSpec(
        r1=0.3, b1=1.0, K1=2.0, eps1=0.5,
        r2=0.3, b2=1.0, K2=2.0, eps2=0.5,
        alpha1=alpha, alpha2=alpha,
        marks=marks, x0=0.5, y0=0.5,
    )


alphas = np.linspace(0.0, 1.1, 45)
lows, highs, classes = [], [], []
for a in alphas:
    v = lm.classify_regime(model_for(float(a)), horizon=100.0)
    lows.append(v.species1.threshold_low)
    highs.append(v.species1.threshold_high)
    classes.append(v.species1.species_class.value)

print(f"{'alpha':>7} {'low':>9} {'high':>9}  class")
for a, lo, hi, c in list(zip(alphas, lows, highs, classes))[::4]:
    print(f"{a:7.3f} {lo:9.4f} {hi:9.4f}  {c}")

# a slowly varying growth rate widens the indeterminate band
seasonal = lm.ModelSpec(
    r1=lm.Sinusoid(mean=0.3, amplitude=0.15, angular_frequency=2 * np.pi / 10),
    b1=1.0, K1=2.0, eps1=0.5,
    r2=0.3, b2=1.0, K2=2.0, eps2=0.5,
    alpha1=0.6, alpha2=0.6, marks=marks, x0=0.5, y0=0.5,
)
v = lm.classify_regime(seasonal, horizon=100.0)
print(
    "\nseasonal growth, alpha=0.6:"
    f" species 1 is {v.species1.species_class.value}"
    f" (low {v.species1.threshold_low:.4f}, high {v.species1.threshold_high:.4f})"
)

plt.figure(figsize=(8, 5))
plt.plot(alphas, lows, label="growth_inf - penalty_sup")
plt.plot(alphas, highs, label="growth_sup - penalty_inf")
plt.axhline(0.0, color="k", lw=0.8)
plt.xlabel("diffusion intensity alpha")
plt.ylabel("threshold margin")
plt.title("Persistence above zero, extinction below zero")
plt.legend()
plt.tight_layout()
plt.savefig("demo02_thresholds.png", dpi=130)
print("saved demo02_thresholds.png")
