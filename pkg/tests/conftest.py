import time
from contextlib import contextmanager

import numpy as np
import pytest

from multieq import builtin, example1_matrix, load_network


@pytest.fixture(scope="session")
def ex1():
    return load_network(example1_matrix())


@pytest.fixture(scope="session")
def tanh():
    return builtin("boltzmann")


def symmetric_random(n, rng, p=0.6):
    """Connected symmetric weighted matrix, rejection-sampled."""
    while True:
        A = np.triu(rng.uniform(0.1, 1.0, (n, n)) * (rng.random((n, n)) < p), 1)
        A = A + A.T
        if connected(A):
            return A


def connected(A):
    return all(bfs_reach(A, i).all() for i in range(len(A)))


def bfs_reach(A, src):
    # plain BFS over the support digraph; independent of scipy.csgraph
    n = len(A)
    seen = np.zeros(n, dtype=bool)
    seen[src] = True
    queue = [src]
    while queue:
        i = queue.pop()
        for j in range(n):
            if A[i, j] > 0 and not seen[j]:
                seen[j] = True
                queue.append(j)
    return seen


def fd5(g, x, h):
    """Five-point central difference of ``g`` at ``x`` (fourth order)."""
    return (-g(x + 2 * h) + 8 * g(x + h) - 8 * g(x - h) + g(x - 2 * h)) / (12 * h)


def derivative_chain_errors(sig, x, rtol=1e-6, atol=1e-9):
    """Worst ``|fd - exact| / (rtol |exact| + atol)`` for d1, d2, d3 of one Sigmoid.

    Values <= 1 pass. Non-smooth functions skip a neighbourhood of 0.
    """
    h = 1e-3 * np.maximum(1.0, np.abs(x))
    keep = np.ones_like(x, dtype=bool) if sig.smooth else np.abs(x) > 3 * h
    worst = {}
    for name, lo, hi in (("d1", sig.f, sig.d1), ("d2", sig.d1, sig.d2), ("d3", sig.d2, sig.d3)):
        exact = hi(x[keep])
        err = np.abs(fd5(lo, x[keep], h[keep]) - exact)
        worst[name] = float((err / (rtol * np.abs(exact) + atol)).max())
    return worst


ACCEPTANCE: dict[int, tuple[bool, str, float]] = {}


@contextmanager
def criterion(number, label, max_seconds):
    """Record a pass/fail line for one acceptance criterion, including its time budget."""
    t0 = time.perf_counter()
    try:
        yield
    except BaseException:
        ACCEPTANCE[number] = (False, label, time.perf_counter() - t0)
        raise
    dt = time.perf_counter() - t0
    ACCEPTANCE[number] = (dt < max_seconds, label, dt)
    if dt >= max_seconds:
        pytest.fail(f"criterion {number} over budget: {dt:.1f}s >= {max_seconds}s")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, label, dt = ACCEPTANCE[k]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {k:2d}. {label} ({dt:.2f}s)")
