"""
Gersgorin disks of the network matrices
=======================================

Disks and eigenvalues of I - H1, I - pi H1, Delta - A and Delta - pi A for the
six-node network. The normalised Laplacian has all its disks centred at 1 with
radius 1; scaling by pi > 1 lets them cross into the left half plane, which is
where negative Laplacian eigenvalues (and with them mixed-sign equilibria)
become possible.
"""

import numpy as np
import matplotlib.pyplot as plt

from multieq import example1_matrix, load_network
from multieq.sweep import gersgorin_panels

net = load_network(example1_matrix())
pi = 1.838
panels = gersgorin_panels(net, pi)
titles = {"a": r"$I - H_1$", "b": rf"$I - {pi} H_1$",
          "c": r"$\Delta - A$", "d": rf"$\Delta - {pi} A$"}

fig, axes = plt.subplots(2, 2, figsize=(8, 7))
theta = np.linspace(0, 2 * np.pi, 200)
for ax, (key, p) in zip(axes.ravel(), panels.items()):
    for d in p["disks"]:
        ax.fill(d.center + d.radius * np.cos(theta), d.radius * np.sin(theta),
                alpha=0.15)
    ax.plot(p["eigs"].real, p["eigs"].imag, "kx")
    ax.axvline(0, color="k", lw=0.5)
    ax.set_aspect("equal")
    ax.set_title(titles[key])
    print(f"{key}: largest distance of an eigenvalue from the disks = {p['max_outside']:.1e}")

plt.tight_layout()
plt.show()
