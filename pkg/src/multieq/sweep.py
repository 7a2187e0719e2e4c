"""Parameter sweeps over pi, random networks, and the two canned experiments
(the six-node network and a 20-node Erdos-Renyi realisation)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import SystemInstance, ensemble_run, uniform_box
from .equilibria import (
    Census,
    check_norm_bound,
    check_ratio_lemma,
    multistart_census,
    necessary_condition_A,
    necessary_condition_H,
)
from .errors import InfeasibleAfterRetries, NotSimple
from .network import WeightedNetwork, check_irreducible, example1_matrix, load_network
from .nonlinearity import SigmoidFamily, builtin
from .spectral import (
    eigvals_sorted,
    fiedler_pair,
    figure2_matrices,
    gersgorin_disks,
    gersgorin_distance,
    spectral_summary,
)

EXAMPLE1_PI = 1.838
K_EXAMPLE1 = (-1, -1, 1, -1, 1, 1)


@dataclass
class PiSummary:
    pi: float
    n_equilibria: int
    n_orthants: int
    n_stable: int
    n_mixed: int
    norm_ratios: list[float]
    origin_eigs: np.ndarray  # spectrum of -I + pi H1


@dataclass
class SweepResult:
    pi_values: np.ndarray
    per_pi: list[PiSummary]
    pi1: float
    pi2: float
    censuses: list[Census] = field(default_factory=list)

    def counts(self) -> np.ndarray:
        return np.array([p.n_equilibria for p in self.per_pi], dtype=int)

    def first_mixed_pi(self) -> float | None:
        for p in self.per_pi:
            if p.n_mixed:
                return p.pi
        return None


def pi_sweep(
    net: WeightedNetwork,
    psi: SigmoidFamily,
    pi_grid,
    starts_per_pi: int = 1000,
    seed: int = 0,
    warm: bool = True,
    keep_census: bool = True,
    threads: int = 1,
) -> SweepResult:
    """Census at every ``pi`` of an increasing grid.

    With ``warm`` the equilibria found at the previous grid value are added
    as starting points, so branches are followed as pi grows. Census ``k``
    uses seed ``(seed, k)``.
    """
    pi_grid = np.asarray(pi_grid, dtype=float)
    if pi_grid.size and (np.any(pi_grid <= 0) or np.any(np.diff(pi_grid) <= 0)):
        raise ValueError("pi_grid must be positive and strictly increasing")
    summary = spectral_summary(net)
    per_pi, censuses = [], []
    previous = None
    for k, pi in enumerate(pi_grid):
        sys = SystemInstance(net, psi, float(pi))
        warm_starts = [r.x for r in previous] if (warm and previous is not None) else None
        c = multistart_census(
            sys,
            starts_per_pi,
            seed=int(np.random.SeedSequence([seed, k]).generate_state(1)[0]),
            warm_starts=warm_starts,
            threads=threads,
        )
        previous = c
        per_pi.append(
            PiSummary(
                pi=float(pi),
                n_equilibria=len(c),
                n_orthants=c.orthant_count(),
                n_stable=len(c.stable()),
                n_mixed=len(c.mixed()),
                norm_ratios=[r.norm_ratio for r in c if r.norm_ratio is not None],
                origin_eigs=pi * summary.eigs_H1 - 1.0,
            )
        )
        if keep_census:
            censuses.append(c)
    return SweepResult(pi_grid, per_pi, 1.0, summary.pi2, censuses)


def random_network(
    n: int,
    edge_prob: float,
    weight_range=(0.1, 1.0),
    seed: int = 0,
    max_tries: int = 1000,
) -> WeightedNetwork:
    """Symmetric weighted Erdos-Renyi network, resampled until connected.

    Each undirected edge is kept with probability ``edge_prob`` and gets one
    weight, uniform on ``weight_range``, for both directions.
    """
    if n < 2 or not 0 < edge_prob <= 1:
        raise ValueError("need n >= 2 and 0 < edge_prob <= 1")
    rng = np.random.default_rng(seed)
    lo, hi = weight_range
    iu = np.triu_indices(n, 1)
    for _ in range(max_tries):
        keep = rng.random(iu[0].size) < edge_prob
        w = rng.uniform(lo, hi, iu[0].size)
        A = np.zeros((n, n))
        A[iu] = np.where(keep, w, 0.0)
        A = A + A.T
        if check_irreducible(A):
            return load_network(A)
    raise InfeasibleAfterRetries(f"no connected graph in {max_tries} draws (n={n}, p={edge_prob})")


def origin_eigs_curve(net: WeightedNetwork, pi_values) -> np.ndarray:
    """Rows ``[pi, pi*lambda_1(H1) - 1, ..., pi*lambda_n(H1) - 1]``."""
    s = spectral_summary(net)
    pi_values = np.asarray(pi_values, dtype=float)
    return np.column_stack([pi_values, pi_values[:, None] * s.eigs_H1[None, :] - 1.0])


def gersgorin_panels(net: WeightedNetwork, pi: float) -> dict:
    """Disks and spectra for ``I - H1``, ``I - pi H1``, ``Delta - A``, ``Delta - pi A``."""
    panels = {}
    for key, M in figure2_matrices(net, pi).items():
        disks = gersgorin_disks(M)
        eigs = eigvals_sorted(M)
        panels[key] = {
            "matrix": M,
            "disks": disks,
            "eigs": eigs,
            "max_outside": float(gersgorin_distance(eigs, disks).max()),
        }
    return panels


def _record_checks(census: Census, sys: SystemInstance) -> dict:
    ratio_ok = all(check_ratio_lemma(sys, r).ok for r in census if not r.is_origin)
    X = np.array([r.x for r in census]).reshape(len(census), -1)
    closure = all(np.abs(X + x).max(axis=1).min() <= 1e-6 for x in X) if len(X) else True
    thm6 = all(
        not (r.sufficient_stable and r.sufficient_unstable)
        and (not r.sufficient_stable or r.stability != "unstable")
        and (not r.sufficient_unstable or r.stability != "stable")
        for r in census
    )
    norm = check_norm_bound(census.records, census.x_plus) if census.x_plus.any() else None
    return {
        "negation_closure": closure,
        "ratio_lemma": ratio_ok,
        "stability_tests_consistent": thm6,
        "norm_bound": None if norm is None else norm.ok,
        "max_residual": max(r.residual for r in census),
    }


def example1_report(
    pi_list=(0.5, 1.1, EXAMPLE1_PI),
    starts: int = 1000,
    seed: int = 0,
    ensemble_starts: int = 100,
    ensemble_pi: float = EXAMPLE1_PI,
    psi: SigmoidFamily | None = None,
    threads: int = 1,
) -> dict:
    """Everything reported for the six-node network.

    Spectral numbers and thresholds, Gersgorin panels (``I - H1`` and
    ``Delta - A`` at pi = 1, the other two at ``ensemble_pi``), the
    linearisation-at-origin eigenvalue curves, a census at every requested pi
    and the convergence table of random trajectories at ``ensemble_pi``.
    """
    psi = psi or builtin("boltzmann")
    net = load_network(example1_matrix())
    s = spectral_summary(net)
    try:
        v2, w2 = fiedler_pair(net, s)
    except NotSimple:
        v2 = w2 = None

    censuses = {}
    conditions = {}
    for pi in pi_list:
        sys = SystemInstance(net, psi, float(pi))
        censuses[float(pi)] = multistart_census(sys, starts, seed=seed, threads=threads)
        condA = necessary_condition_A(s.eigs_A, net.delta, pi)
        conditions[float(pi)] = {
            "mixed_possible_H": necessary_condition_H(s, pi),
            "condition_A": condA.holds,
            "condition_A_witness": condA.witness,
            "pi_lambda2nd_A_gt_delta_max": bool(pi * s.lambda2nd_A > net.delta_max),
            "lambda2_Ltilde": float(eigvals_sorted(np.diag(net.delta) - pi * net.A)[1].real),
            "checks": _record_checks(censuses[float(pi)], sys),
        }

    sys_e = SystemInstance(net, psi, ensemble_pi)
    eq_census = censuses.get(float(ensemble_pi)) or multistart_census(sys_e, starts, seed=seed)
    eqs = eq_census.records
    outcomes = ensemble_run(sys_e, ensemble_starts, eqs, uniform_box(2.0), seed=seed)
    table = {}
    for o in outcomes:
        if o.attractor is None:
            key = "unresolved"
        else:
            r = eqs[o.attractor]
            key = f"{r.orthant_string}:{r.stability}:{o.attractor}"
        table[key] = table.get(key, 0) + 1

    return {
        "network": net,
        "spectral": s,
        "fiedler": (v2, w2),
        "thresholds": {"pi1": 1.0, "pi2": s.pi2},
        "gersgorin": gersgorin_panels(net, ensemble_pi),
        "gersgorin_pi": ensemble_pi,
        "origin_eigs": origin_eigs_curve(net, np.linspace(0.0, 2.5, 251)),
        "censuses": censuses,
        "conditions": conditions,
        "ensemble": {"pi": ensemble_pi, "equilibria": eqs, "outcomes": outcomes, "table": table},
        "seed": seed,
    }


def example2_report(
    n: int = 20,
    p: float = 0.1,
    pi_grid=None,
    starts: int = 1000,
    seed: int = 42,
    weight_range=(0.1, 1.0),
    psi: SigmoidFamily | None = None,
    threads: int = 1,
) -> dict:
    """Random-network experiment: counts, norm ratios and the polar scatter data.

    The default grid is 50 values evenly spaced on ``(1, 20]``.
    """
    psi = psi or builtin("boltzmann")
    pi_grid = np.linspace(1.0, 20.0, 51)[1:] if pi_grid is None else np.asarray(pi_grid, float)
    net = random_network(n, p, weight_range, seed=seed)
    s = spectral_summary(net)
    sweep = pi_sweep(net, psi, pi_grid, starts, seed=seed, threads=threads)

    counts = np.array(
        [[q.pi, q.n_equilibria, q.n_orthants, q.n_stable, q.n_mixed] for q in sweep.per_pi]
    ).reshape(-1, 5)
    ratios, polar = [], []
    checks = []
    for c in sweep.censuses:
        sys = SystemInstance(net, psi, c.pi)
        checks.append(_record_checks(c, sys))
        for r in c:
            if r.norm_ratio is None:
                continue
            ratios.append((c.pi, r.norm_ratio))
            polar.append((c.pi, r.norm_ratio, r.n_unstable, r.negative_fraction, r.stability))
    return {
        "network": net,
        "spectral": s,
        "thresholds": {"pi1": 1.0, "pi2": s.pi2},
        "sweep": sweep,
        "counts": counts,
        "ratios": ratios,
        "polar": polar,
        "checks": checks,
        "seed": seed,
        "params": {"n": n, "p": p, "starts": starts, "weight_range": list(weight_range)},
    }
