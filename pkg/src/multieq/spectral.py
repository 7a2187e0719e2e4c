"""Eigenstructure of the network matrices, bifurcation thresholds, Gersgorin disks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NotSimple, NotSymmetrizable
from .network import SYM_EXACT_RTOL, WeightedNetwork, symmetrizer_residual

SIMPLE_GAP = 1e-8
# Largest imaginary part tolerated when an approximately symmetrizable matrix
# goes through the general eigensolver.
IMAG_TOL = 1e-8


@dataclass(frozen=True)
class SpectralSummary:
    eigs_A: np.ndarray
    eigs_H1: np.ndarray
    rho_A: float
    lambda2nd_A: float
    lambda2nd_H1: float
    pi2: float
    alg_conn: float
    lambda2nd_simple: bool


@dataclass(frozen=True)
class GersgorinDisk:
    center: float
    radius: float
    row_index: int


def _sign_convention(V):
    """Unit columns, largest-magnitude component positive."""
    V = V / np.linalg.norm(V, axis=0)
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def real_spectrum(M, d):
    """Eigen-decomposition of a symmetrizable matrix.

    ``diag(d) @ M`` must be symmetric. The matrix is conjugated to
    ``D^{1/2} M D^{-1/2}``, which is symmetric, and handed to ``eigh``; the
    eigenvectors are mapped back with ``D^{-1/2}``.

    When ``d`` only symmetrizes ``M`` approximately (rounded input data) the
    conjugated matrix is not exactly symmetric, and averaging it with its
    transpose would move the eigenvalues by the size of the asymmetry. In that
    case the general eigensolver is applied to the conjugated matrix instead
    and the (negligible) imaginary parts are dropped after a check.

    Returns
    -------
    vals : ndarray, shape (n,)
        Eigenvalues in nondecreasing order.
    vecs : ndarray, shape (n, n)
        Right eigenvectors as columns, unit 2-norm, largest-|component| positive.
    """
    if d is None:
        raise NotSymmetrizable([], "no symmetrizer supplied")
    M = np.asarray(M, dtype=float)
    d = np.asarray(d, dtype=float)
    s = np.sqrt(d)
    T = s[:, None] * M / s[None, :]
    if symmetrizer_residual(M, d) <= SYM_EXACT_RTOL:
        vals, U = np.linalg.eigh(0.5 * (T + T.T))
    else:
        w, U = scipy.linalg.eig(T)
        scale = max(1.0, np.abs(w).max())
        if np.abs(w.imag).max() > IMAG_TOL * scale:
            raise NotSymmetrizable([], "complex spectrum; symmetrizer too inaccurate")
        order = np.argsort(w.real)
        vals, U = w.real[order], U[:, order].real
    V = U / s[:, None]
    return vals, _sign_convention(V)


def spectral_summary(net: WeightedNetwork) -> SpectralSummary:
    eigs_A, _ = real_spectrum(net.A, net.symmetrizer)
    # D A symmetric  <=>  (D Delta) H1 symmetric
    eigs_H1, _ = real_spectrum(net.H1, net.symmetrizer * net.delta)
    n = net.n
    lam2 = float(eigs_H1[-2])
    simple = eigs_H1[-1] - eigs_H1[-2] > SIMPLE_GAP
    if n >= 3:
        simple = simple and (eigs_H1[-2] - eigs_H1[-3] > SIMPLE_GAP)
    return SpectralSummary(
        eigs_A=eigs_A,
        eigs_H1=eigs_H1,
        rho_A=float(eigs_A[-1]),
        lambda2nd_A=float(eigs_A[-2]),
        lambda2nd_H1=lam2,
        pi2=1.0 / lam2 if lam2 > 0 else float("inf"),
        alg_conn=1.0 - lam2,
        lambda2nd_simple=bool(simple),
    )


def fiedler_pair(net: WeightedNetwork, summary: SpectralSummary | None = None):
    """Right and left eigenvectors of ``H1`` for its second largest eigenvalue.

    ``v2`` has unit 2-norm (largest-|component| positive), ``w2`` is scaled so
    that ``w2 @ v2 == 1``.
    """
    summary = summary or spectral_summary(net)
    if not summary.lambda2nd_simple:
        raise NotSimple(
            f"lambda_(n-1)(H1) = {summary.lambda2nd_H1:.6g} is not simple "
            f"(gap tolerance {SIMPLE_GAP:g})"
        )
    dh = net.symmetrizer * net.delta
    _, vecs = real_spectrum(net.H1, dh)
    v2 = vecs[:, -2]
    if net.symmetrizer_exact:
        # H1^T (D Delta) = (D Delta) H1, so D Delta v is a left eigenvector.
        w2 = dh * v2
    else:
        vals, W = scipy.linalg.eig(net.H1.T)
        k = np.argmin(np.abs(vals - summary.lambda2nd_H1))
        w2 = W[:, k].real
    w2 = w2 / (w2 @ v2)
    return v2, w2


def gersgorin_disks(M) -> list[GersgorinDisk]:
    M = np.asarray(M, dtype=float)
    absM = np.abs(M)
    radii = absM.sum(axis=1) - np.diag(absM)
    return [GersgorinDisk(float(M[i, i]), float(radii[i]), i) for i in range(M.shape[0])]


def gersgorin_distance(eigvals, disks) -> np.ndarray:
    """Distance of each eigenvalue to the union of the disks (0 when inside)."""
    z = np.asarray(eigvals, dtype=complex)
    c = np.array([dk.center for dk in disks])
    r = np.array([dk.radius for dk in disks])
    gap = np.abs(z[:, None] - c[None, :]) - r[None, :]
    return np.maximum(gap.min(axis=1), 0.0)


def eigvals_sorted(M) -> np.ndarray:
    """Eigenvalues of a general matrix, sorted by real part (complex dtype)."""
    w = np.linalg.eigvals(np.asarray(M, dtype=float))
    return w[np.argsort(w.real, kind="stable")]


def figure2_matrices(net: WeightedNetwork, pi: float) -> dict[str, np.ndarray]:
    """The four matrices whose disks and spectra make up the Gersgorin figure."""
    eye = np.eye(net.n)
    D = np.diag(net.delta)
    return {
        "a": eye - net.H1,
        "b": eye - pi * net.H1,
        "c": D - net.A,
        "d": D - pi * net.A,
    }
