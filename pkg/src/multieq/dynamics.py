"""Vector field, Jacobian and fixed-step integration of

    dx/dt = -Delta x + pi A psi(x)

All evaluators accept a single state of shape ``(n,)`` or a batch ``(m, n)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import StepFailure
from .network import WeightedNetwork
from .nonlinearity import SigmoidFamily

CONVERGED_TOL = 1e-10
MATCH_TOL = 1e-4


@dataclass(frozen=True)
class SystemInstance:
    net: WeightedNetwork
    psi: SigmoidFamily
    pi: float

    def __post_init__(self):
        if not self.pi > 0:
            raise ValueError(f"social effort pi must be positive, got {self.pi}")
        self.psi.check_size(self.net.n)

    @property
    def n(self) -> int:
        return self.net.n

    def with_pi(self, pi: float) -> "SystemInstance":
        return SystemInstance(self.net, self.psi, pi)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    terminal_reason: str  # "converged" | "max_time" | "step_failure"

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def vector_field(sys: SystemInstance, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return -sys.net.delta * x + sys.pi * sys.psi.eval(x) @ sys.net.A.T


def vector_field_h(sys: SystemInstance, x) -> np.ndarray:
    """Same field written as ``Delta (-x + pi H1 psi(x))``."""
    x = np.asarray(x, dtype=float)
    return sys.net.delta * (-x + sys.pi * sys.psi.eval(x) @ sys.net.H1.T)


def jacobian(sys: SystemInstance, x) -> np.ndarray:
    """``-Delta + pi A diag(psi'(x))``; Metzler for every x."""
    x = np.asarray(x, dtype=float)
    dpsi = sys.psi.d1(x)
    J = sys.pi * sys.net.A * dpsi[..., None, :]
    idx = np.arange(sys.n)
    J[..., idx, idx] -= sys.net.delta
    return J


def default_step(net: WeightedNetwork) -> float:
    return 0.01 * min(1.0 / net.delta_max, 1.0)


def _rk4(sys, X, t_max, h, stride, conv_tol):
    """Batched RK4. Rows stop individually once their field norm drops below
    ``conv_tol``; frozen rows are carried along unchanged."""
    X = np.array(X, dtype=float)
    m = X.shape[0]
    reason = np.array(["max_time"] * m, dtype=object)
    active = np.ones(m, dtype=bool)
    times = [0.0]
    states = [X.copy()]
    n_steps = int(np.ceil(t_max / h))
    t = 0.0
    for k in range(1, n_steps + 1):
        F = vector_field(sys, X[active])
        done = np.abs(F).max(axis=1) < conv_tol
        if done.any():
            rows = np.flatnonzero(active)[done]
            reason[rows] = "converged"
            active[rows] = False
            F = F[~done]
        if not active.any():
            break
        Y = X[active]
        k1 = F
        k2 = vector_field(sys, Y + 0.5 * h * k1)
        k3 = vector_field(sys, Y + 0.5 * h * k2)
        k4 = vector_field(sys, Y + h * k3)
        Y = Y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.isfinite(Y).all():
            bad = np.flatnonzero(active)[~np.isfinite(Y).all(axis=1)]
            reason[bad] = "step_failure"
            raise StepFailure(f"non-finite state at t={t + h:.6g} for rows {bad.tolist()}")
        X[active] = Y
        t = k * h
        if k % stride == 0:
            times.append(t)
            states.append(X.copy())
    if times[-1] != t:
        times.append(t)
        states.append(X.copy())
    return np.array(times), np.stack(states), reason


def integrate(
    sys: SystemInstance,
    x0,
    t_max: float = 1000.0,
    h: float | None = None,
    stride: int = 100,
    conv_tol: float = CONVERGED_TOL,
) -> Trajectory:
    """Fixed-step RK4 from ``x0`` until ``t_max`` or until ``||f(x)||_inf < conv_tol``.

    The default step is ``0.01 * min(1 / delta_max, 1)``. States are recorded
    every ``stride`` steps plus the final one.

    Raises
    ------
    StepFailure
        If the state becomes non-finite.
    """
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    h = default_step(sys.net) if h is None else h
    x0 = np.asarray(x0, dtype=float).reshape(1, -1)
    times, states, reason = _rk4(sys, x0, t_max, h, stride, conv_tol)
    return Trajectory(times, states[:, 0, :], str(reason[0]))


def integrate_batch(sys, X0, t_max=1000.0, h=None, stride=100, conv_tol=CONVERGED_TOL):
    """Integrate many initial conditions at once; returns (times, states[k, m, n], reasons)."""
    h = default_step(sys.net) if h is None else h
    return _rk4(sys, np.atleast_2d(X0), t_max, h, stride, conv_tol)


def uniform_box(half_width: float = 2.0) -> Callable:
    def sample(rng, n):
        return rng.uniform(-half_width, half_width, size=n)

    return sample


@dataclass
class EnsembleOutcome:
    x0: np.ndarray
    terminal: np.ndarray
    attractor: int | None  # index into the equilibrium list, None if unresolved
    reason: str


def ensemble_run(
    sys: SystemInstance,
    n_starts: int,
    equilibria,
    sampler: Callable | None = None,
    seed: int = 0,
    t_max: float = 1000.0,
    h: float | None = None,
    match_tol: float = MATCH_TOL,
) -> list[EnsembleOutcome]:
    """Integrate ``n_starts`` random initial conditions and match each end state
    to the nearest of ``equilibria`` (infinity norm, within ``match_tol``).

    Start ``i`` draws from its own generator seeded with ``(seed, i)``, so the
    result does not depend on how the starts are batched.
    """
    if n_starts == 0:
        return []
    sampler = sampler or uniform_box(2.0)
    X0 = np.array([sampler(np.random.default_rng([seed, i]), sys.n) for i in range(n_starts)])
    _, states, reasons = integrate_batch(sys, X0, t_max=t_max, h=h, stride=10**9)
    final = states[-1]
    eq = np.array([np.asarray(getattr(e, "x", e), dtype=float) for e in equilibria])
    out = []
    for i in range(n_starts):
        att = None
        if len(eq):
            dist = np.abs(eq - final[i]).max(axis=1)
            k = int(np.argmin(dist))
            if dist[k] < match_tol:
                att = k
        out.append(EnsembleOutcome(X0[i], final[i], att, str(reasons[i])))
    return out


def trajectory_csv_rows(traj: Trajectory):
    for t, x in zip(traj.times, traj.states):
        yield [t, *x.tolist()]
