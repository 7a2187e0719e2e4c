"""Interaction network: validation and the matrices derived from it.

A network is a nonnegative, hollow, irreducible and diagonally symmetrizable
adjacency matrix ``A``. From it we derive the inertia vector
``delta = A @ 1``, the row-normalised matrix ``H1 = diag(delta)^-1 A`` and the
two Laplacians ``L1 = I - H1`` and ``L = diag(delta) - A``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import (
    NegativeEntry,
    NonzeroDiagonal,
    NotIrreducible,
    NotSymmetrizable,
)

# Symmetrizer residual ||DA - (DA)^T||_inf / ||DA||_inf accepted on load.
# Published matrices are rounded to a few digits, which breaks the
# cycle-product identity at the 1e-3 level.
SYM_RTOL = 1e-2
# Below this residual the symmetrizer is treated as exact.
SYM_EXACT_RTOL = 1e-10


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class WeightedNetwork:
    """Validated interaction network (immutable)."""

    A: np.ndarray
    delta: np.ndarray
    H1: np.ndarray
    symmetrizer: np.ndarray | None
    symmetrizer_residual: float = 0.0

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def symmetrizer_exact(self) -> bool:
        return self.symmetrizer is not None and self.symmetrizer_residual <= SYM_EXACT_RTOL

    @property
    def delta_min(self) -> float:
        return float(self.delta.min())

    @property
    def delta_max(self) -> float:
        return float(self.delta.max())

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.A, self.A.T))


@dataclass(frozen=True)
class LaplacianSet:
    L1: np.ndarray
    L: np.ndarray
    A: np.ndarray
    delta: np.ndarray

    def Ltilde_at(self, pi: float) -> np.ndarray:
        """Return ``diag(delta) - pi * A``."""
        return np.diag(self.delta) - pi * self.A


def check_irreducible(A) -> bool:
    """True iff the digraph with an edge i->j whenever a_ij > 0 is strongly connected."""
    A = np.asarray(A, dtype=float)
    if A.shape[0] == 1:
        return bool(A[0, 0] != 0)
    ncomp, _ = connected_components(A > 0, directed=True, connection="strong")
    return ncomp == 1


def _unreachable(A):
    """Nodes outside the strong component of node 0."""
    _, labels = connected_components(A > 0, directed=True, connection="strong")
    return np.flatnonzero(labels != labels[0])


def symmetrizer_residual(A, d) -> float:
    """Relative asymmetry ``||DA - (DA)^T||_inf / ||DA||_inf`` of ``diag(d) A``."""
    S = np.asarray(d)[:, None] * np.asarray(A)
    scale = np.abs(S).sum(axis=1).max()
    if scale == 0:
        return 0.0
    return float(np.abs(S - S.T).sum(axis=1).max() / scale)


def find_symmetrizer(A, rtol: float = SYM_RTOL) -> np.ndarray:
    """Positive ``d`` with ``d[0] = 1`` such that ``diag(d) @ A`` is symmetric.

    The ratios ``d_j / d_i = a_ij / a_ji`` are propagated along a BFS spanning
    tree of the undirected support graph; every remaining edge then closes a
    cycle whose product condition is checked through the final residual.

    Raises
    ------
    NotSymmetrizable
        If the sign pattern is not symmetric, or if the residual of the
        propagated ``d`` exceeds ``rtol``. The witness is the sign-asymmetric
        pair or the worst non-tree edge.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    support = A > 0
    bad = np.argwhere(support != support.T)
    if bad.size:
        bad = [(i, j) for i, j in bad if i < j] or [tuple(bad[0])]
        raise NotSymmetrizable(bad, "sign-asymmetric pair")

    d = np.full(n, np.nan)
    d[0] = 1.0
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in np.flatnonzero(support[i]):
            if np.isnan(d[j]):
                d[j] = d[i] * A[i, j] / A[j, i]
                queue.append(j)
    if np.isnan(d).any():
        raise NotSymmetrizable(
            [(0, int(j)) for j in np.flatnonzero(np.isnan(d))],
            "support graph disconnected",
        )

    res = symmetrizer_residual(A, d)
    if res > rtol:
        S = d[:, None] * A
        i, j = np.unravel_index(np.argmax(np.abs(S - S.T)), S.shape)
        raise NotSymmetrizable(
            [(min(i, j), max(i, j))],
            f"cycle-product condition fails (relative residual {res:.3g} > {rtol:g})",
        )
    return d


def load_network(matrix_data, sym_rtol: float = SYM_RTOL) -> WeightedNetwork:
    """Validate an adjacency matrix and build the derived quantities.

    Parameters
    ----------
    matrix_data : array_like, shape (n, n)
        Nonnegative weights with zero diagonal, ``n >= 2``.
    sym_rtol : float
        Accepted relative symmetrizer residual, see :func:`find_symmetrizer`.
    """
    A = np.array(matrix_data, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"adjacency matrix must be square, got shape {A.shape}")
    if A.shape[0] < 2:
        raise ValueError("need at least two nodes")
    if not np.isfinite(A).all():
        raise ValueError("adjacency matrix has non-finite entries")

    neg = np.argwhere(A < 0)
    if neg.size:
        raise NegativeEntry(neg)
    diag = np.flatnonzero(np.diag(A) != 0)
    if diag.size:
        raise NonzeroDiagonal(diag)

    delta = A.sum(axis=1)
    isolated = np.flatnonzero(delta <= 0)
    if isolated.size:
        raise NotIrreducible(isolated, "zero row sum")
    if not check_irreducible(A):
        raise NotIrreducible(_unreachable(A))

    d = find_symmetrizer(A, rtol=sym_rtol)
    return WeightedNetwork(
        A=_frozen(A),
        delta=_frozen(delta),
        H1=_frozen(A / delta[:, None]),
        symmetrizer=_frozen(d),
        symmetrizer_residual=symmetrizer_residual(A, d),
    )


def laplacians(net: WeightedNetwork) -> LaplacianSet:
    return LaplacianSet(
        L1=np.eye(net.n) - net.H1,
        L=np.diag(net.delta) - net.A,
        A=net.A,
        delta=net.delta,
    )


def read_matrix(path) -> np.ndarray:
    """Read an adjacency matrix from CSV (n rows of n values) or JSON.

    The JSON form is ``{"n": int, "rows": [[...], ...]}``.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        obj = json.loads(text)
        rows = np.array(obj["rows"], dtype=float)
        if "n" in obj and rows.shape != (obj["n"], obj["n"]):
            raise ValueError(f"declared n={obj['n']} but rows have shape {rows.shape}")
        return rows
    rows = []
    for k, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(v) for v in line.split(",")])
        except ValueError as exc:
            raise ValueError(f"{path}:{k}: {exc}") from None
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ValueError(f"{path}: expected a square CSV matrix")
    return np.array(rows)


def write_matrix_csv(path, A) -> None:
    np.savetxt(path, np.asarray(A), delimiter=",", fmt="%.17g")


def example1_matrix() -> np.ndarray:
    """The six-node network shipped with the package."""
    from importlib.resources import files

    return read_matrix(files("multieq") / "data" / "example1_n6.csv")
