"""
Return map of a Blaschke product
================================

For B_t(w) = w(w - t)/(1 - t w) the second iterate has a pair of fixed
points on the unit circle.  Their multiplier, found numerically, is compared
against 1 + (t - 1)(t - 3); the curve is saved as ``blaschke_multiplier.png``.
"""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from modspace.blaschke import lambda_formula, petersen_disk, return_map_analysis

ts = np.linspace(0.0, 0.999, 200)
numeric = np.array([return_map_analysis(t).lambda_numeric for t in ts])
closed = np.array([lambda_formula(t) for t in ts])
print("largest deviation:", np.max(np.abs(numeric - closed)))

# as t -> 1 the disk confining the log-multiplier shrinks to a point
for t in (0.5, 0.9, 0.99, 0.999):
    d = petersen_disk(t, 2, 5)
    print(f"t = {t}: radius {d.radius:.5f}, modulus range {d.modulus_range[0]:.5f}..{d.modulus_range[1]:.5f}")

plt.plot(ts, numeric, label="numeric")
plt.plot(ts, closed, "--", label="1 + (t-1)(t-3)")
plt.xlabel("t")
plt.ylabel("multiplier")
plt.legend()
plt.savefig("blaschke_multiplier.png", dpi=120)
