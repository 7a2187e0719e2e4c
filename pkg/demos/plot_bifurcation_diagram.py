"""
Bifurcation diagram by repeated censuses
========================================

Instead of numerical continuation we run a warm-started census on a grid of pi
and plot the signed projection of every equilibrium on the consensus
direction and on the second eigenvector v2. Two pitchforks are visible: at
pi = 1 along the consensus direction and at pi2 along v2.
"""

import numpy as np
import matplotlib.pyplot as plt

from multieq import builtin, example1_matrix, fiedler_pair, load_network, pi_sweep

net = load_network(example1_matrix())
v2, _ = fiedler_pair(net)
ones = np.ones(net.n) / np.sqrt(net.n)

grid = np.linspace(0.8, 2.0, 61)
sweep = pi_sweep(net, builtin("boltzmann"), grid, starts_per_pi=300, seed=1)

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4), sharex=True)
for c in sweep.censuses:
    for r in c:
        style = dict(marker="o", ms=3, ls="none",
                     color="C0" if r.stability == "stable" else "C3")
        ax1.plot(c.pi, r.x @ ones, **style)
        ax2.plot(c.pi, r.x @ v2, **style)
for ax, lab in ((ax1, r"$\langle x, \mathbf{1} \rangle / \sqrt{n}$"),
                (ax2, r"$\langle x, v_2 \rangle$")):
    ax.axvline(1.0, ls=":", color="k")
    ax.axvline(sweep.pi2, ls=":", color="k")
    ax.set_xlabel(r"$\pi$")
    ax.set_ylabel(lab)
ax1.set_title("blue: stable, red: unstable")

print("first pi with mixed-sign equilibria:", sweep.first_mixed_pi(), " pi2 =", round(sweep.pi2, 4))
plt.tight_layout()
plt.show()
