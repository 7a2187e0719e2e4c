import numpy as np
import pytest

from multieq import InfeasibleAfterRetries, pi_sweep, random_network, spectral_summary
from multieq.sweep import example1_report, gersgorin_panels, origin_eigs_curve


def test_grid_counts(ex1, tanh):
    res = pi_sweep(ex1, tanh, [0.5, 1.1, 1.5], starts_per_pi=500, seed=1)
    c = res.counts()
    assert c[0] == 1 and c[1] == 3 and c[2] > 3
    assert res.first_mixed_pi() == 1.5
    assert res.pi2 == pytest.approx(spectral_summary(ex1).pi2)


def test_empty_grid(ex1, tanh):
    res = pi_sweep(ex1, tanh, [])
    assert res.per_pi == [] and res.counts().size == 0 and res.first_mixed_pi() is None


def test_bad_grid(ex1, tanh):
    with pytest.raises(ValueError):
        pi_sweep(ex1, tanh, [1.2, 1.1])


def test_threshold_bracketing(ex1, tanh):
    pi2 = spectral_summary(ex1).pi2
    grid = pi2 * np.linspace(0.96, 1.06, 11)
    step = grid[1] - grid[0]
    res = pi_sweep(ex1, tanh, grid, starts_per_pi=300, seed=2)
    first = res.first_mixed_pi()
    assert pi2 * 0.98 <= first <= pi2 + step
    above = [q for q in res.per_pi if q.pi > pi2]
    assert all(q.n_equilibria >= 5 for q in above)


def test_origin_eig_crossing(ex1):
    s = spectral_summary(ex1)
    pis = np.linspace(0.5, 2.0, 301)
    curve = origin_eigs_curve(ex1, pis)
    lam = curve[:, -2]
    assert np.all(lam[pis < s.pi2] < 0) and np.all(lam[pis > s.pi2] > 0)
    top = curve[:, -1]
    assert np.all(top[pis < 1] < 0) and np.all(top[pis > 1] > 0)


def test_random_network_complete_and_two_cycle():
    net = random_network(5, 1.0, seed=3)
    off = ~np.eye(5, dtype=bool)
    assert np.all(net.A[off] > 0)
    assert np.array_equal(net.A, net.A.T)
    two = random_network(2, 1.0, weight_range=(1.0, 1.0))
    assert np.array_equal(two.A, [[0, 1], [1, 0]])


def test_random_network_protocol():
    net = random_network(20, 0.1, seed=42)
    w = net.A[net.A > 0]
    assert np.array_equal(net.A, net.A.T)
    assert w.min() >= 0.1 and w.max() <= 1.0
    assert net.symmetrizer_exact
    assert np.array_equal(random_network(20, 0.1, seed=42).A, net.A)


def test_random_network_infeasible():
    with pytest.raises(InfeasibleAfterRetries):
        random_network(30, 0.01, max_tries=3)
    with pytest.raises(ValueError):
        random_network(1, 0.5)


def test_gersgorin_panels(ex1):
    p = gersgorin_panels(ex1, 1.838)
    assert set(p) == {"a", "b", "c", "d"}
    assert all(v["max_outside"] <= 1e-9 for v in p.values())


def test_example1_report_small():
    rep = example1_report(pi_list=(0.5, 1.838), starts=300, ensemble_starts=10)
    assert rep["spectral"].pi2 == pytest.approx(1.216, abs=1.5e-3)
    cond = rep["conditions"][1.838]
    assert cond["lambda2_Ltilde"] == pytest.approx(-0.302, abs=1.5e-3)
    assert cond["mixed_possible_H"] and cond["condition_A"]
    assert not rep["conditions"][0.5]["mixed_possible_H"]
    for ch in (cond["checks"], rep["conditions"][0.5]["checks"]):
        assert ch["negation_closure"] and ch["ratio_lemma"] and ch["stability_tests_consistent"]
    assert len(rep["censuses"][1.838].in_orthant((-1, -1, 1, -1, 1, 1))) >= 3
    assert "unresolved" not in rep["ensemble"]["table"]
