"""Locating and classifying equilibria.

Equilibria are found by damped Newton iteration from many starting points,
deduplicated, closed under negation (the field is odd) and then classified
through the Jacobian spectrum. The remaining functions are the structural
predicates relating equilibria to the network spectrum: the threshold
conditions for mixed-sign equilibria, the sufficient stability tests, the
ratio lemma and the norm bound by the positive equilibrium.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import bisect

from .dynamics import SystemInstance, jacobian, vector_field
from .errors import NoConvergence, NotIdenticalPsi, SingularJacobian
from .spectral import SpectralSummary

DEDUP_TOL = 1e-6
ZERO_TOL = 1e-8
MARGINAL_BAND = 1e-8
ARMIJO_C = 1e-4
MAX_BACKTRACK = 40
TIKHONOV = 1e-8


def newton_tol(sys: SystemInstance) -> float:
    return 1e-10 * max(1.0, sys.net.delta_max)


@dataclass
class EquilibriumRecord:
    x: np.ndarray
    residual: float
    orthant: tuple[int, ...]
    degenerate: bool
    jac_eigs_real: np.ndarray | None = None
    stability: str | None = None
    sufficient_stable: bool | None = None
    sufficient_unstable: bool | None = None
    norm_ratio: float | None = None
    # False when x+ came from the Newton fallback rather than the scalar root
    analytic: bool = True

    @property
    def n_unstable(self) -> int:
        return int((self.jac_eigs_real > MARGINAL_BAND).sum())

    @property
    def orthant_string(self) -> str:
        return "".join({1: "+", -1: "-", 0: "0"}[s] for s in self.orthant)

    @property
    def is_origin(self) -> bool:
        return all(s == 0 for s in self.orthant)

    @property
    def is_mixed(self) -> bool:
        s = np.array(self.orthant)
        return bool((s > 0).any() and (s < 0).any())

    @property
    def negative_fraction(self) -> float:
        return float(np.mean(np.array(self.orthant) < 0))

    def to_dict(self) -> dict:
        return {
            "x": self.x.tolist(),
            "residual": self.residual,
            "orthant": self.orthant_string,
            "degenerate": self.degenerate,
            "stability": self.stability,
            "sufficient_stable": self.sufficient_stable,
            "sufficient_unstable": self.sufficient_unstable,
            "jac_eigs_real": None if self.jac_eigs_real is None else self.jac_eigs_real.tolist(),
            "norm_ratio": self.norm_ratio,
        }


def orthant_of(x):
    x = np.asarray(x)
    s = np.where(np.abs(x) < ZERO_TOL, 0, np.sign(x)).astype(int)
    return tuple(int(v) for v in s), bool((s == 0).any())


def classify_stability(sys: SystemInstance, record: EquilibriumRecord) -> EquilibriumRecord:
    """Fill in the Jacobian spectrum, the spectral stability class and the two
    sufficient tests ``pi * max psi'(x) < 1`` (stable) and
    ``pi * min psi'(x) > 1`` (unstable)."""
    J = jacobian(sys, record.x)
    re = np.sort(np.linalg.eigvals(J).real)
    record.jac_eigs_real = re
    if re[-1] < -MARGINAL_BAND:
        record.stability = "stable"
    elif re[-1] > MARGINAL_BAND:
        record.stability = "unstable"
    else:
        record.stability = "marginal"
    dpsi = sys.psi.d1(record.x)
    record.sufficient_stable = bool(sys.pi * dpsi.max() < 1.0)
    record.sufficient_unstable = bool(sys.pi * dpsi.min() > 1.0)
    return record


def make_record(sys: SystemInstance, x, x_plus=None, analytic=True) -> EquilibriumRecord:
    x = np.asarray(x, dtype=float)
    orth, degenerate = orthant_of(x)
    rec = EquilibriumRecord(
        x=x,
        residual=float(np.abs(vector_field(sys, x)).max()),
        orthant=orth,
        degenerate=degenerate,
        analytic=analytic,
    )
    if x_plus is not None:
        nplus = np.linalg.norm(x_plus)
        if nplus > 0:
            rec.norm_ratio = float(np.linalg.norm(x) / nplus)
    return classify_stability(sys, rec)


# -- Newton ------------------------------------------------------------------


def _solve_rows(J, rhs):
    """Solve ``J[k] p[k] = rhs[k]``; rows with a singular ``J`` get a Tikhonov
    least-squares step. Returns (P, ok)."""
    try:
        return np.linalg.solve(J, rhs[..., None])[..., 0], np.ones(len(J), dtype=bool)
    except np.linalg.LinAlgError:
        pass
    P = np.empty_like(rhs)
    ok = np.ones(len(J), dtype=bool)
    eye = np.eye(J.shape[-1])
    for k in range(len(J)):
        try:
            P[k] = np.linalg.solve(J[k], rhs[k])
        except np.linalg.LinAlgError:
            try:
                P[k] = np.linalg.solve(J[k].T @ J[k] + TIKHONOV * eye, J[k].T @ rhs[k])
            except np.linalg.LinAlgError:
                P[k] = 0.0
                ok[k] = False
    return P, ok


def newton_batch(sys: SystemInstance, X0, tol=None, max_iter=100):
    """Damped Newton on ``f(x) = 0`` for every row of ``X0``.

    Each row takes the full Newton step, halved until the Armijo condition on
    ``||f||_2^2 / 2`` holds. Returns the final iterates, a converged mask
    (``||f||_inf < tol``) and a mask of rows whose Jacobian could not be
    solved even after regularisation.
    """
    tol = newton_tol(sys) if tol is None else tol
    X = np.array(X0, dtype=float, ndmin=2)
    F = vector_field(sys, X)
    conv = np.abs(F).max(axis=1) < tol
    singular = np.zeros(len(X), dtype=bool)
    for _ in range(max_iter):
        act = np.flatnonzero(~conv & ~singular)
        if act.size == 0:
            break
        Xa, Fa = X[act], F[act]
        P, ok = _solve_rows(jacobian(sys, Xa), -Fa)
        singular[act[~ok]] = True
        phi0 = 0.5 * (Fa * Fa).sum(axis=1)
        t = np.ones(len(act))
        Xn = Xa + P
        Fn = vector_field(sys, Xn)
        for _ in range(MAX_BACKTRACK):
            phi = 0.5 * (Fn * Fn).sum(axis=1)
            pending = ~(phi <= (1.0 - 2.0 * ARMIJO_C * t) * phi0) | ~np.isfinite(phi)
            if not pending.any():
                break
            t[pending] *= 0.5
            Xn[pending] = Xa[pending] + t[pending, None] * P[pending]
            Fn[pending] = vector_field(sys, Xn[pending])
        X[act], F[act] = Xn, Fn
        conv[act] = np.abs(Fn).max(axis=1) < tol
    return X, conv, singular


def newton_solve(sys: SystemInstance, x0, tol=None, max_iter=100, x_plus=None) -> EquilibriumRecord:
    """Single-start damped Newton; returns a classified record.

    Raises
    ------
    NoConvergence
        When the residual is still above tolerance after ``max_iter`` steps.
    SingularJacobian
        When the Jacobian cannot be solved even with Tikhonov damping.
    """
    x0 = np.asarray(x0, dtype=float)
    if not np.isfinite(x0).all():
        raise ValueError("x0 must be finite")
    X, conv, singular = newton_batch(sys, x0[None], tol=tol, max_iter=max_iter)
    if singular[0]:
        raise SingularJacobian("Jacobian singular even after Tikhonov damping")
    if not conv[0]:
        res = float(np.abs(vector_field(sys, X[0])).max())
        raise NoConvergence(f"no convergence in {max_iter} iterations (residual {res:.3g})", X[0], res)
    return make_record(sys, X[0], x_plus=x_plus)


# -- positive equilibrium -----------------------------------------------------


def consensus_level(psi, pi: float, n_grid: int = 2000) -> float:
    """Largest ``alpha > 0`` with ``psi(alpha) = alpha / pi``, or 0 if none.

    For a sigmoidal ``psi`` the ratio ``psi(a)/a`` decreases from 1, so a root
    exists iff ``pi > 1`` and it is unique. The root lies in ``(0, pi]``
    because ``|psi| < 1``. Bisection to ``xtol=1e-14``.
    """
    c = psi.components[0]

    def g(a):
        return float(c.f(np.float64(a))) - a / pi

    grid = np.linspace(0.0, pi, n_grid + 1)[1:]
    above = np.flatnonzero(c.f(grid) / grid > 1.0 / pi)
    if above.size == 0:
        # the ratio may still exceed 1/pi below the first grid point
        lo = grid[0] * 1e-6
        if g(lo) <= 0:
            return 0.0
    else:
        lo = grid[above[-1]]
    if lo >= pi:
        return pi
    return bisect(g, lo, pi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500)


def positive_equilibrium(sys: SystemInstance, strict: bool = False) -> EquilibriumRecord:
    """The equilibrium ``x+`` in the positive orthant.

    With identical node functions ``x+ = alpha * 1`` where ``alpha`` solves
    ``psi(alpha) = alpha / pi``; for ``pi <= 1`` (sigmoidal case) this is the
    origin. With heterogeneous functions no closed form exists: unless
    ``strict`` (then :class:`NotIdenticalPsi` is raised) Newton is run from a
    positive start and the record is flagged ``analytic=False``.
    """
    n = sys.n
    if sys.psi.identical:
        alpha = consensus_level(sys.psi, sys.pi)
        x = np.full(n, alpha)
        return make_record(sys, x, x_plus=x if alpha > 0 else None)
    if strict:
        raise NotIdenticalPsi("x+ has a closed form only for identical node functions")
    rec = newton_solve(sys, np.full(n, sys.pi))
    rec.analytic = False
    if rec.is_mixed:
        raise NoConvergence("Newton fallback for x+ left the positive orthant", rec.x)
    return rec


# -- census -------------------------------------------------------------------


@dataclass
class Census:
    """Distinct equilibria found at one value of pi."""

    pi: float
    records: list[EquilibriumRecord]
    x_plus: np.ndarray
    n_starts: int
    n_failed: int
    seed: int | None = None
    notes: list[str] = field(default_factory=list)

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def __getitem__(self, k):
        return self.records[k]

    def mixed(self) -> list[EquilibriumRecord]:
        return [r for r in self.records if r.is_mixed]

    def in_orthant(self, signature) -> list[EquilibriumRecord]:
        sig = tuple(int(s) for s in signature)
        return [r for r in self.records if r.orthant == sig]

    def orthant_count(self) -> int:
        return len({r.orthant for r in self.records})

    def stable(self) -> list[EquilibriumRecord]:
        return [r for r in self.records if r.stability == "stable"]


def _dedup(points, tol=DEDUP_TOL):
    if not len(points):
        return []
    P = np.asarray(points)
    buf = np.empty_like(P)
    m = 0
    for x in P:
        if m and np.abs(buf[:m] - x).max(axis=1).min() <= tol:
            continue
        buf[m] = x
        m += 1
    return list(buf[:m].copy())


def multistart_census(
    sys: SystemInstance,
    n_starts: int = 1000,
    box_scale: float = 1.5,
    seed: int = 0,
    warm_starts=None,
    threads: int = 1,
    tol=None,
    max_iter: int = 100,
) -> Census:
    """Find the equilibria reachable by Newton from random starts.

    Starts are uniform in ``[-b, b]^n`` with ``b = box_scale * max(alpha, 1)``,
    where ``alpha`` is the consensus level of ``x+``; every equilibrium of an
    identical sigmoidal system lies in ``|x_i| <= alpha``. The origin, ``x+``,
    ``x-`` and any ``warm_starts`` are always tried first. Converged points are
    deduplicated (infinity-norm distance ``1e-6``) in start order and the set
    is closed under negation.
    """
    if n_starts < 0:
        raise ValueError("n_starts must be nonnegative")
    tol = newton_tol(sys) if tol is None else tol
    xp_rec = positive_equilibrium(sys)
    x_plus = xp_rec.x
    alpha = float(np.abs(x_plus).max())
    half = box_scale * max(alpha, 1.0)
    rng = np.random.default_rng(seed)
    starts = rng.uniform(-half, half, size=(n_starts, sys.n))
    fixed = [np.zeros(sys.n), x_plus, -x_plus]
    if warm_starts is not None and len(warm_starts):
        fixed += [np.asarray(w, dtype=float) for w in warm_starts]
    X0 = np.vstack([np.array(fixed), starts])

    threads = max(1, int(threads or 1))
    if threads == 1:
        X, conv, _ = newton_batch(sys, X0, tol=tol, max_iter=max_iter)
    else:
        chunks = np.array_split(np.arange(len(X0)), threads)
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda ix: newton_batch(sys, X0[ix], tol, max_iter), chunks))
        X = np.vstack([p[0] for p in parts])
        conv = np.concatenate([p[1] for p in parts])

    points = _dedup([x for x, c in zip(X, conv) if c])
    closed = list(points)
    if points:
        P = np.array(points)
        mirrored = np.array([np.abs(P + x).max(axis=1).min() <= DEDUP_TOL for x in P])
        # points are pairwise distinct, so mirrors cannot collide with each other
        for x, seen in zip(points, mirrored):
            if not seen and np.abs(vector_field(sys, -x)).max() < tol:
                closed.append(-x)
    ref = x_plus if (sys.psi.identical and alpha > 0) else None
    records = [make_record(sys, x, x_plus=ref) for x in closed]
    records.sort(key=lambda r: (-round(float(np.linalg.norm(r.x)), 12), r.orthant))
    n_failed = int((~conv[len(fixed):]).sum())
    return Census(sys.pi, records, x_plus, n_starts, n_failed, seed)


# -- structural predicates ----------------------------------------------------


def necessary_condition_H(summary: SpectralSummary, pi: float, mu: float = 1.0) -> bool:
    """Whether mixed-sign equilibria are possible at ``pi``.

    Sigmoidal case (``mu == 1``): ``pi * lambda_(n-1)(H1) > 1``, i.e. ``pi > pi2``;
    with a simple ``lambda_(n-1)(H1)`` the condition is also sufficient.
    Otherwise the relaxed form ``pi * lambda_(n-1)(H1) >= 1 / mu``.
    """
    lam = pi * summary.lambda2nd_H1
    if mu <= 1.0:
        return bool(lam > 1.0)
    return bool(lam >= 1.0 / mu)


class ConditionA(NamedTuple):
    holds: bool
    witness: float | None


def necessary_condition_A(eigs_A, delta, pi: float, mu: float = 1.0) -> ConditionA:
    """Adjacency-matrix form of the necessary condition.

    Looks for a positive, non-Perron eigenvalue ``lam`` of ``A`` with
    ``pi * lam > delta_min`` (sigmoidal, ``mu == 1``) or
    ``pi * lam >= delta_min / mu`` (``mu > 1``). The witness is the largest
    such eigenvalue.
    """
    eigs = np.sort(np.asarray(eigs_A, dtype=float))[:-1]
    dmin = float(np.min(delta))
    cand = eigs[eigs > 0]
    if mu <= 1.0:
        ok = cand[pi * cand > dmin]
    else:
        ok = cand[pi * cand >= dmin / mu]
    if ok.size == 0:
        return ConditionA(False, None)
    return ConditionA(True, float(ok.max()))


@dataclass
class RatioReport:
    ok: bool
    min_ratio: float
    bound: float
    violations: list[int]


def check_ratio_lemma(sys: SystemInstance, record: EquilibriumRecord, tol: float = 1e-10) -> RatioReport:
    """Check ``psi(x_i) / x_i >= 1 / pi`` on every component.

    Components with ``|x_i| <= 1e-8`` use the limit ``psi'(0)``.
    """
    x = record.x
    small = np.abs(x) <= ZERO_TOL
    safe = np.where(small, 1.0, x)
    ratio = np.where(small, sys.psi.d1(np.zeros_like(x)), sys.psi.eval(safe) / safe)
    bound = 1.0 / sys.pi
    bad = np.flatnonzero(ratio < bound - tol)
    return RatioReport(bad.size == 0, float(ratio.min()), bound, bad.tolist())


@dataclass
class NormBoundReport:
    ok: bool
    max_norm_ratio: float
    max_component_ratio: float
    violations: list[int]  # indices of offending records


def check_norm_bound(records, x_plus, rtol: float = 1e-8) -> NormBoundReport:
    """Check ``|x_i| <= x+_i (1 + rtol)`` componentwise (hence also in norm)
    for every record."""
    x_plus = np.asarray(x_plus, dtype=float)
    nplus = np.linalg.norm(x_plus)
    bad = []
    max_nr = 0.0
    max_cr = 0.0
    for k, r in enumerate(records):
        x = np.abs(np.asarray(getattr(r, "x", r)))
        if nplus > 0:
            max_nr = max(max_nr, float(np.linalg.norm(x) / nplus))
            max_cr = max(max_cr, float((x / x_plus).max()))
        comp_ok = (x <= x_plus * (1.0 + rtol)).all()
        norm_ok = np.linalg.norm(x) <= nplus * (1.0 + rtol)
        if not (comp_ok and norm_ok):
            bad.append(k)
    return NormBoundReport(not bad, max_nr, max_cr, bad)
