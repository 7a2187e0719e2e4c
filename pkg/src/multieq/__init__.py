"""Multiequilibria analysis of saturated cooperative network dynamics

    dx/dt = -Delta x + pi A psi(x).
"""

from .dynamics import SystemInstance, ensemble_run, integrate, jacobian, vector_field
from .equilibria import (
    Census,
    EquilibriumRecord,
    check_norm_bound,
    check_ratio_lemma,
    classify_stability,
    multistart_census,
    necessary_condition_A,
    necessary_condition_H,
    newton_solve,
    positive_equilibrium,
)
from .errors import *  # noqa: F401,F403
from .network import (
    LaplacianSet,
    WeightedNetwork,
    check_irreducible,
    example1_matrix,
    find_symmetrizer,
    laplacians,
    load_network,
    read_matrix,
)
from .nonlinearity import SigmoidFamily, builtin, compute_mu, custom, heterogeneous, verify_assumptions
from .spectral import (
    GersgorinDisk,
    SpectralSummary,
    fiedler_pair,
    gersgorin_disks,
    real_spectrum,
    spectral_summary,
)
from .sweep import SweepResult, example1_report, example2_report, pi_sweep, random_network

__version__ = "0.1.0"
