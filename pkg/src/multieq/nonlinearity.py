"""Saturating node nonlinearities and their assumption checks.

Every function here is odd, strictly increasing with unit slope at the
origin, and saturates at +/-1. A function is *sigmoidal* when it is in
addition strictly concave on the positive half-line; then
``|psi(x)| < |x|`` for ``x != 0`` and the ratio coefficient ``mu`` equals 1.

Note that the Boltzmann form ``(1 - exp(-2x)) / (1 + exp(-2x))`` is the
hyperbolic tangent, so it is evaluated with ``np.tanh``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import UnknownKind

Fn = Callable[[np.ndarray], np.ndarray]

# |psi| this close to 1 is saturated to working precision: derivatives there
# underflow and their sign cannot be checked.
SATURATED = 1e-15


def _sech2(u):
    e = np.exp(-2.0 * np.abs(u))
    return 4.0 * e / (1.0 + e) ** 2


def _tanh_derivs(u):
    t = np.tanh(u)
    g1 = _sech2(u)
    g2 = -2.0 * t * g1
    g3 = -2.0 * g1 * (1.0 - 3.0 * t * t)
    return t, g1, g2, g3


def _boltzmann(x):
    return np.tanh(x)


def _boltzmann_d1(x):
    return _sech2(x)


def _boltzmann_d2(x):
    return -2.0 * np.tanh(x) * _sech2(x)


def _boltzmann_d3(x):
    t = np.tanh(x)
    return -2.0 * _sech2(x) * (1.0 - 3.0 * t * t)


def _mm(x):
    return x / (1.0 + np.abs(x))


def _mm_d1(x):
    return 1.0 / (1.0 + np.abs(x)) ** 2


def _mm_d2(x):
    # one-sided value at 0 is +/-2; report 0 there (odd extension)
    return -2.0 * np.sign(x) / (1.0 + np.abs(x)) ** 3


def _mm_d3(x):
    return 6.0 / (1.0 + np.abs(x)) ** 4


def _ct(x):
    return np.tanh(x + x**3)


def _ct_d1(x):
    return _sech2(x + x**3) * (1.0 + 3.0 * x * x)


def _ct_d2(x):
    _, g1, g2, _ = _tanh_derivs(x + x**3)
    u1 = 1.0 + 3.0 * x * x
    return g2 * u1 * u1 + g1 * 6.0 * x


def _ct_d3(x):
    _, g1, g2, g3 = _tanh_derivs(x + x**3)
    u1 = 1.0 + 3.0 * x * x
    return g3 * u1**3 + 3.0 * g2 * u1 * 6.0 * x + 6.0 * g1


@dataclass(frozen=True)
class Sigmoid:
    """A scalar nonlinearity with closed-form derivatives up to third order."""

    name: str
    f: Fn
    d1: Fn
    d2: Fn
    d3: Fn
    # False where d2/d3 are discontinuous at 0 (Michaelis-Menten)
    smooth: bool = True


_BUILTINS = {
    "boltzmann": Sigmoid("boltzmann", _boltzmann, _boltzmann_d1, _boltzmann_d2, _boltzmann_d3),
    "michaelis_menten": Sigmoid("michaelis_menten", _mm, _mm_d1, _mm_d2, _mm_d3, smooth=False),
    "cubic_tanh": Sigmoid("cubic_tanh", _ct, _ct_d1, _ct_d2, _ct_d3),
}
_ALIASES = {
    "tanh": "boltzmann",
    "mm": "michaelis_menten",
    "michaelis-menten": "michaelis_menten",
    "cubic-tanh": "cubic_tanh",
}
_SIGMOIDAL = {"boltzmann": True, "michaelis_menten": True, "cubic_tanh": False}


@dataclass(frozen=True)
class SigmoidFamily:
    """Node nonlinearities ``psi_i``; one shared function or one per node.

    Methods act elementwise on arrays whose last axis indexes nodes. With a
    shared function any shape is accepted.
    """

    kind: str
    components: tuple[Sigmoid, ...]
    sigmoidal_hint: bool | None = field(default=None, compare=False)

    @property
    def identical(self) -> bool:
        return len(self.components) == 1 or all(
            c is self.components[0] for c in self.components[1:]
        )

    @property
    def per_node(self):
        return self.components[0] if self.identical else self.components

    def _apply(self, attr, x):
        x = np.asarray(x, dtype=float)
        if self.identical:
            return getattr(self.components[0], attr)(x)
        if x.shape[-1] != len(self.components):
            raise ValueError(
                f"state has {x.shape[-1]} components, family has {len(self.components)}"
            )
        out = np.empty_like(x)
        for i, c in enumerate(self.components):
            out[..., i] = getattr(c, attr)(x[..., i])
        return out

    def eval(self, x):
        return self._apply("f", x)

    def d1(self, x):
        return self._apply("d1", x)

    def d2(self, x):
        return self._apply("d2", x)

    def d3(self, x):
        return self._apply("d3", x)

    def check_size(self, n: int) -> None:
        if not self.identical and len(self.components) != n:
            raise ValueError(f"family has {len(self.components)} functions for {n} nodes")

    @cached_property
    def is_sigmoidal(self) -> bool:
        if self.sigmoidal_hint is not None:
            return self.sigmoidal_hint
        return verify_assumptions(self, ("A4",)).ok

    @cached_property
    def mu(self) -> float:
        return compute_mu(self)

    @property
    def beta(self) -> np.ndarray:
        """Third derivatives at the origin, one per component."""
        return np.array([float(c.d3(np.float64(0.0))) for c in self.components])


def builtin(kind: str) -> SigmoidFamily:
    """Shared built-in nonlinearity: ``boltzmann``, ``michaelis_menten`` or ``cubic_tanh``.

    ``cubic_tanh`` is ``tanh(x + x**3)``: odd, increasing, saturated, unit slope
    at 0, but convex on an interval of positive x, hence not sigmoidal and
    with ``mu > 1``.
    """
    key = _ALIASES.get(kind, kind)
    if key not in _BUILTINS:
        raise UnknownKind(f"unknown nonlinearity {kind!r}; choose from {sorted(_BUILTINS)}")
    return SigmoidFamily(key, (_BUILTINS[key],), sigmoidal_hint=_SIGMOIDAL[key])


def custom(f: Fn, d1: Fn, d2: Fn, d3: Fn, name: str = "custom") -> SigmoidFamily:
    return SigmoidFamily("custom", (Sigmoid(name, f, d1, d2, d3),))


def heterogeneous(parts: Sequence[SigmoidFamily | Sigmoid | str]) -> SigmoidFamily:
    """Per-node family from a list of built-in names, families or scalar functions."""
    comps = []
    for p in parts:
        if isinstance(p, str):
            p = builtin(p)
        comps.append(p.components[0] if isinstance(p, SigmoidFamily) else p)
    hint = None
    if all(c.name in _SIGMOIDAL for c in comps):
        hint = all(_SIGMOIDAL[c.name] for c in comps)
    return SigmoidFamily("custom", tuple(comps), sigmoidal_hint=hint)


def _scalar_ratio(c: Sigmoid):
    def r(x):
        x = float(x)
        return float(c.f(np.float64(x))) / x if x != 0 else float(c.d1(np.float64(0.0)))

    return r


def compute_mu(f: SigmoidFamily, x_max: float = 50.0, n_grid: int = 10_000) -> float:
    """Largest value of ``psi_i(x) / x`` over nodes and ``x > 0``.

    The limit ``psi'(0) = 1`` at the origin is included as a candidate. A
    coarse grid on ``(0, x_max]`` brackets the maximum, which is then refined
    with a bounded scalar search (``xatol=1e-10``).
    """
    best = 0.0
    grid = np.linspace(x_max / n_grid, x_max, n_grid)
    for c in f.components:
        best = max(best, float(c.d1(np.float64(0.0))))
        ratio = c.f(grid) / grid
        k = int(np.argmax(ratio))
        lo = grid[k - 1] if k > 0 else grid[0] * 1e-3
        hi = grid[min(k + 1, n_grid - 1)]
        res = minimize_scalar(
            lambda x: -_scalar_ratio(c)(x),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-10},
        )
        best = max(best, float(ratio[k]), -float(res.fun))
    return best


@dataclass
class AssumptionReport:
    """Outcome of the grid check; ``violations`` maps assumption -> sample points."""

    checked: tuple[str, ...]
    violations: dict[str, list[float]]

    @property
    def ok(self) -> bool:
        return not any(self.violations.values())

    def passed(self, which: str) -> bool:
        return not self.violations.get(which)


def verification_grid(x_max: float = 20.0, n: int = 1000) -> np.ndarray:
    """Symmetric grid on ``[-x_max, x_max]`` plus a dense patch near 0."""
    coarse = np.linspace(-x_max, x_max, n)
    fine = np.logspace(-8, 0, 200)
    return np.unique(np.concatenate([coarse, fine, -fine]))


def verify_assumptions(f: SigmoidFamily, which=("A1", "A2", "A3", "A4"), grid=None) -> AssumptionReport:
    """Sample-based check of oddness (A1), monotonicity (A2), saturation (A3)
    and sigmoidality (A4).

    This is a sanity gate on a finite grid, not a proof. Where ``|psi|`` is 1
    to working precision the derivatives underflow, so strict sign checks are
    skipped there.
    """
    x = verification_grid() if grid is None else np.asarray(grid, dtype=float)
    viol: dict[str, list[float]] = {w: [] for w in which}
    for c in f.components:
        y = c.f(x)
        live = 1.0 - np.abs(y) > SATURATED
        if "A1" in viol:
            bad = np.abs(y + c.f(-x)) > 1e-12
            if abs(float(c.f(np.float64(0.0)))) > 1e-12:
                bad |= x == 0
            viol["A1"] += x[bad].tolist()
        if "A2" in viol:
            bad = (c.d1(x) <= 0) & live
            viol["A2"] += x[bad].tolist()
            if abs(float(c.d1(np.float64(0.0))) - 1.0) > 1e-12:
                viol["A2"].append(0.0)
        if "A3" in viol:
            # Michaelis-Menten is only 1/(1+x) away from 1, so probe far out
            far = np.array([-1e9, 1e9])
            bad = np.abs(c.f(far) - np.sign(far)) > 1e-8
            viol["A3"] += far[bad].tolist()
        if "A4" in viol:
            pos = (x > 0) & live
            viol["A4"] += x[pos & (c.d2(x) >= 0)].tolist()
            # equality is allowed: near 0 the gap is below rounding
            viol["A4"] += x[np.abs(y) > np.abs(x)].tolist()
    return AssumptionReport(tuple(which), {k: sorted(set(v)) for k, v in viol.items()})
