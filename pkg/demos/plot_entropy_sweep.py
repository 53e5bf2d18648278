"""
Entropy over a patch of the moduli plane
========================================

Sweep a rectangle of (sigma1, sigma2) space, estimate the real entropy of a
representative map in every cell and draw the result with the barrier curve
on top.  The picture is written to ``entropy_sweep.png``.
"""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from modspace.config import Config
from modspace.experiments import sweep
from modspace.moduli import build_barrier
from modspace.pcf import find_center

region = (-30.0, 5.0, -20.0, 40.0)
grid = sweep(region, 96, 96, "Entropy", Config())
values = grid.values()
print("cells:", values.size, " entropy range:", np.nanmin(values), np.nanmax(values))

# the barrier: the upward ray from the period-3 center plus the curve through its component
barrier = build_barrier(find_center(3, 1))
curve = np.array(barrier.vertices)

fig, ax = plt.subplots(figsize=(7, 6))
im = ax.imshow(values, origin="lower", extent=region, aspect="auto", cmap="viridis")
ax.contour(values, levels=[0.1, 0.3, 0.4812, 0.6], extent=region, colors="w", linewidths=0.6)
ax.plot(curve[:, 0], curve[:, 1], "r-", lw=1.5)
ax.plot([barrier.start[0]] * 2, [barrier.start[1], region[3]], "r-", lw=1.5)
ax.set_xlim(region[0], region[1])
ax.set_ylim(region[2], region[3])
ax.set_xlabel("sigma1")
ax.set_ylabel("sigma2")
fig.colorbar(im, label="entropy")
fig.savefig("entropy_sweep.png", dpi=120)
