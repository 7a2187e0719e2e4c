"""
Six-node network: thresholds and equilibria
===========================================

The bundled six-node network is irreducible and symmetrizable but not
symmetric. Its origin loses stability at pi = 1 (consensus branches x+ and x-)
and again at pi2 = 1 / lambda_(n-1)(H1), where equilibria with mixed signs
appear along the second eigenvector of H1.
"""

import numpy as np
import matplotlib.pyplot as plt

from multieq import (SystemInstance, builtin, example1_matrix, fiedler_pair,
                     load_network, multistart_census, spectral_summary)
from multieq.dynamics import ensemble_run, uniform_box
from multieq.sweep import origin_eigs_curve

net = load_network(example1_matrix())
s = spectral_summary(net)
print(f"rho(A) = {s.rho_A:.3f}, lambda_5(A) = {s.lambda2nd_A:.3f}")
print(f"lambda_5(H1) = {s.lambda2nd_H1:.3f}, pi2 = {s.pi2:.3f}")

v2, _ = fiedler_pair(net, s)
print("sign pattern of v2:", "".join("+" if v > 0 else "-" for v in v2))

###############################################################################
# Eigenvalues of the linearisation at the origin, -I + pi H1. The top one
# crosses zero at pi = 1, the second at pi2.

curve = origin_eigs_curve(net, np.linspace(0, 2.5, 251))
fig, ax = plt.subplots()
ax.plot(curve[:, 0], curve[:, 1:], color="0.6", lw=1)
ax.plot(curve[:, 0], curve[:, -1], label="largest")
ax.plot(curve[:, 0], curve[:, -2], label="second largest")
ax.axhline(0, color="k", lw=0.5)
for p in (1.0, s.pi2):
    ax.axvline(p, ls=":", color="k")
ax.set_xlabel(r"$\pi$")
ax.set_ylabel(r"eigenvalues of $-I + \pi H_1$")
ax.legend()

###############################################################################
# Multistart censuses on both sides of the thresholds.

psi = builtin("boltzmann")
for pi in (0.5, 1.1, 1.838):
    c = multistart_census(SystemInstance(net, psi, pi), 1000, seed=0)
    print(f"\npi = {pi}: {len(c)} equilibria")
    for r in c:
        print(f"  {r.orthant_string}  {r.stability:9s} |x|/|x+| = {r.norm_ratio or 0:.3f}")

###############################################################################
# Random trajectories at pi = 1.838 end at one of the four stable points.

sys_ = SystemInstance(net, psi, 1.838)
eqs = multistart_census(sys_, 1000, seed=0).records
out = ensemble_run(sys_, 100, eqs, uniform_box(2.0), seed=0)
hits = {}
for o in out:
    key = "unresolved" if o.attractor is None else eqs[o.attractor].orthant_string
    hits[key] = hits.get(key, 0) + 1
print("\nend points of 100 trajectories:", hits)

fig, ax = plt.subplots()
ax.bar(range(len(hits)), list(hits.values()))
ax.set_xticks(range(len(hits)), list(hits.keys()), rotation=30)
ax.set_ylabel("trajectories")
plt.tight_layout()
plt.show()
