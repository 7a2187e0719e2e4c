import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multieq import (
    NoConvergence,
    NotIdenticalPsi,
    SystemInstance,
    builtin,
    check_norm_bound,
    check_ratio_lemma,
    fiedler_pair,
    heterogeneous,
    load_network,
    multistart_census,
    necessary_condition_A,
    necessary_condition_H,
    newton_solve,
    positive_equilibrium,
    spectral_summary,
    vector_field,
)
from multieq.equilibria import DEDUP_TOL, consensus_level, newton_tol

from conftest import symmetric_random

K = (-1, -1, 1, -1, 1, 1)


def bisect_root(g, lo, hi, tol=1e-15):
    glo = g(lo)
    assert glo * g(hi) < 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) * glo > 0:
            lo, glo = mid, g(mid)
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.fixture(scope="module")
def census_1838(ex1, tanh):
    return multistart_census(SystemInstance(ex1, tanh, 1.838), 1000, seed=3)


def test_consensus_level_pi2(tanh):
    g = lambda a: np.tanh(a) - a / 2
    assert g(1.0) > 0 > g(2.0)
    oracle = bisect_root(g, 1.0, 2.0)
    assert consensus_level(tanh, 2.0) == pytest.approx(oracle, abs=1e-12)
    assert oracle == pytest.approx(1.91501, abs=1e-5)


def test_positive_equilibrium(ex1, tanh):
    sys = SystemInstance(ex1, tanh, 1.838)
    rec = positive_equilibrium(sys)
    a = rec.x[0]
    assert np.all(rec.x == a)
    oracle = bisect_root(lambda s: np.tanh(s) - s / 1.838, 0.5, 1.838)
    assert a == pytest.approx(oracle, abs=1e-12)
    assert np.abs(vector_field(sys, rec.x)).max() < 1e-9
    assert np.allclose(1.838 * ex1.H1 @ np.tanh(rec.x), rec.x, atol=1e-12)
    assert rec.stability == "stable"


@pytest.mark.parametrize("pi", [0.3, 1.0])
def test_positive_equilibrium_below_one(ex1, tanh, pi):
    assert np.all(positive_equilibrium(SystemInstance(ex1, tanh, pi)).x == 0)


def test_positive_equilibrium_heterogeneous(ex1):
    sys = SystemInstance(ex1, heterogeneous(["boltzmann", "mm"] * 3), 3.0)
    rec = positive_equilibrium(sys)
    assert not rec.analytic
    assert np.all(rec.x > 0) and rec.residual < 1e-9
    with pytest.raises(NotIdenticalPsi):
        positive_equilibrium(sys, strict=True)


def test_newton_from_origin(ex1, tanh):
    rec = newton_solve(SystemInstance(ex1, tanh, 1.838), np.zeros(6))
    assert np.all(rec.x == 0) and rec.residual == 0
    assert rec.is_origin and rec.sufficient_unstable and rec.stability == "unstable"


@pytest.mark.parametrize("scale", [2.0, 100.0])
def test_newton_to_x_plus(ex1, tanh, scale):
    sys = SystemInstance(ex1, tanh, 1.838)
    rec = newton_solve(sys, scale * np.ones(6))
    assert np.allclose(rec.x, positive_equilibrium(sys).x, atol=1e-9)
    assert rec.residual < newton_tol(sys)


def test_newton_no_convergence(ex1, tanh):
    with pytest.raises(NoConvergence):
        newton_solve(SystemInstance(ex1, tanh, 1.838), np.linspace(-2, 2, 6), max_iter=1)


def test_x_plus_stable_just_above_one(ex1, tanh):
    rec = positive_equilibrium(SystemInstance(ex1, tanh, 1.05))
    assert rec.stability == "stable"


def test_census_pi_half(ex1, tanh):
    c = multistart_census(SystemInstance(ex1, tanh, 0.5), 300, seed=1)
    assert len(c) == 1 and c[0].is_origin


@pytest.mark.parametrize("pi", [1.05, 1.1, 1.2])
def test_census_below_pi2(ex1, tanh, pi):
    c = multistart_census(SystemInstance(ex1, tanh, pi), 1000, seed=2)
    xp = positive_equilibrium(SystemInstance(ex1, tanh, pi)).x
    got = sorted(tuple(np.round(r.x, 8)) for r in c)
    want = sorted(tuple(np.round(v, 8)) for v in (np.zeros(6), xp, -xp))
    assert got == want


def test_census_1838(census_1838, ex1, tanh):
    c = census_1838
    inK = c.in_orthant(K)
    assert len(inK) >= 3
    stable = [r for r in inK if r.stability == "stable"]
    assert len(stable) == 1 and stable[0].sufficient_stable
    assert all(r.stability == "unstable" for r in inK if r is not stable[0])
    sys = SystemInstance(ex1, tanh, 1.838)
    for r in c:
        assert r.residual < 1e-9
        assert np.abs(vector_field(sys, -r.x)).max() < newton_tol(sys)
        assert any(np.abs(q.x + r.x).max() <= DEDUP_TOL for q in c)
        assert not (r.sufficient_stable and r.sufficient_unstable)
        if r.sufficient_stable:
            assert r.stability == "stable"
        if r.sufficient_unstable:
            assert r.stability == "unstable"
    X = np.array([r.x for r in c])
    dist = np.abs(X[:, None] - X[None]).max(axis=2) + np.eye(len(X)) * 1e9
    assert dist.min() > DEDUP_TOL


def test_ratio_lemma(census_1838, ex1, tanh):
    sys = SystemInstance(ex1, tanh, 1.838)
    for r in census_1838:
        assert check_ratio_lemma(sys, r).ok
    xp = positive_equilibrium(sys)
    rep = check_ratio_lemma(sys, xp)
    assert rep.min_ratio == pytest.approx(1 / 1.838, abs=1e-12)
    assert check_ratio_lemma(sys, census_1838.records[-1]).ok  # origin sorts last


def test_norm_bound(census_1838):
    rep = check_norm_bound(census_1838.records, census_1838.x_plus)
    assert rep.ok and rep.max_norm_ratio == pytest.approx(1.0)
    ratios = {r.orthant_string: r.norm_ratio for r in census_1838}
    assert ratios["------"] == pytest.approx(1.0)
    assert ratios["000000"] == 0.0
    bad = check_norm_bound([1.1 * census_1838.x_plus], census_1838.x_plus)
    assert not bad.ok and bad.violations == [0]


def test_necessary_conditions(ex1):
    s = spectral_summary(ex1)
    assert not necessary_condition_H(s, 1.1)
    assert necessary_condition_H(s, 1.838)
    a = necessary_condition_A(s.eigs_A, ex1.delta, 1.838)
    assert a.holds and a.witness == pytest.approx(0.515, abs=1.5e-3)
    assert 1.838 * s.lambda2nd_A > ex1.delta.min()
    two = spectral_summary(load_network([[0, 1], [1, 0]]))
    assert not any(necessary_condition_H(two, p) for p in (0.5, 3, 100))
    # relaxed form with mu > 1
    assert necessary_condition_H(s, 1.0 / s.lambda2nd_H1 / 1.1, mu=1.1)


def test_onset_along_fiedler(ex1, tanh):
    s = spectral_summary(ex1)
    v2, _ = fiedler_pair(ex1, s)
    c = multistart_census(SystemInstance(ex1, tanh, 1.02 * s.pi2), 1000, seed=5)
    mixed = c.mixed()
    assert len(mixed) == 2
    for r in mixed:
        cos = r.x @ v2 / np.linalg.norm(r.x) / np.linalg.norm(v2)
        assert abs(cos) > 0.9


def test_census_threads_and_seed(ex1, tanh):
    sys = SystemInstance(ex1, tanh, 1.838)
    a = multistart_census(sys, 200, seed=9)
    b = multistart_census(sys, 200, seed=9, threads=3)
    assert len(a) == len(b)
    assert all(np.array_equal(p.x, q.x) for p, q in zip(a, b))


def _random_net(rng, n):
    S = symmetric_random(n, rng)
    d = rng.uniform(0.5, 2, n)
    return load_network(S / d[:, None])


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 3), st.integers(0, 2**32 - 1))
def test_small_networks_one_positive_eigenvalue(n, seed):
    net = _random_net(np.random.default_rng(seed), n)
    s = spectral_summary(net)
    assert (s.eigs_A > 1e-12).sum() <= 1
    assert not necessary_condition_A(s.eigs_A, net.delta, 50.0).holds


@settings(max_examples=15, deadline=None)
@given(st.integers(4, 6), st.integers(0, 2**32 - 1), st.floats(0.3, 0.95))
def test_gate_consistency(n, seed, frac):
    net = _random_net(np.random.default_rng(seed), n)
    s = spectral_summary(net)
    pi = frac * min(s.pi2, 20.0)
    if not s.lambda2nd_simple or pi <= 0:
        return
    assert not necessary_condition_H(s, pi)
    c = multistart_census(SystemInstance(net, builtin("boltzmann"), pi), 200, seed=seed)
    assert not c.mixed()
