"""
Equilibria of a random 20-node network
======================================

A symmetric Erdos-Renyi network (edge probability 0.1, weights uniform on
[0.1, 1]) is swept over pi. The number of equilibria grows quickly once pi
passes pi2, every equilibrium stays inside the ball of radius |x+|, and the
stable ones sit close to that boundary.

This is a reduced run (200 starts, 20 values of pi); the command
``multieq example2`` runs the full desk-scale version.
"""

import numpy as np
import matplotlib.pyplot as plt

from multieq.sweep import example2_report

rep = example2_report(n=20, p=0.1, pi_grid=np.linspace(1, 20, 21)[1:], starts=200, seed=42)
print(f"pi2 of this realisation: {rep['thresholds']['pi2']:.4f}")

counts = rep["counts"]
fig, axes = plt.subplots(1, 3, figsize=(14, 4))
axes[0].plot(counts[:, 0], counts[:, 1], "o-")
axes[0].set_xlabel(r"$\pi$")
axes[0].set_ylabel("equilibria found")

###############################################################################
# Norm ratio |x| / |x+| of every equilibrium found.

r = np.array(rep["ratios"])
axes[1].plot(r[:, 0], r[:, 1], ".", ms=2)
axes[1].axhline(1.0, color="k", lw=0.5)
axes[1].set_xlabel(r"$\pi$")
axes[1].set_ylabel(r"$\|\bar x\| / \|x^+\|$")

###############################################################################
# Polar view: radius is the norm ratio, angle the fraction of negative
# components, colour the number of unstable directions.

pol = [p for p in rep["polar"] if p[1] > 0]
ang = np.pi * np.array([p[3] for p in pol])
rad = np.array([p[1] for p in pol])
nun = np.array([p[2] for p in pol])
axes[2].remove()
ax = fig.add_subplot(1, 3, 3, projection="polar")
sc = ax.scatter(ang, rad, c=nun, s=4, cmap="viridis")
fig.colorbar(sc, ax=ax, label="unstable eigenvalues")

stable = [p[1] for p in rep["polar"] if p[4] == "stable"]
unstable = [p[1] for p in rep["polar"] if p[4] == "unstable"]
print(f"mean norm ratio: stable {np.mean(stable):.3f}, unstable {np.mean(unstable):.3f}")
plt.tight_layout()
plt.show()
