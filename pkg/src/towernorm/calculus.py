"""Directional calculus of the tower norm.

phi_{x,h}(t) = |||x + t h||| - |||x|||, its one-sided derivatives at 0, the
norming functional g_m at x^m, the tangent split h = h_m + C_m x^m and
Birkhoff-James orthogonality tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .norm import level_norm, tower_norm
from .space import TowerSpace, TowerVector, _pad, axpy, project

__all__ = [
    "DerivativeEstimate",
    "TangentDecomposition",
    "phi",
    "directional_derivative",
    "phi_identities_check",
    "norming_functional",
    "pairing",
    "tangent_decomposition",
    "is_bj_orthogonal",
    "symmetric_quotient",
    "symmetric_log_grid",
    "DEFAULT_T0",
    "DEFAULT_HALVINGS",
]

DEFAULT_T0 = 2.0 ** -4
# 16 halvings end at t = 2^-20; deeper steps drown the quotient in rounding
DEFAULT_HALVINGS = 16


@dataclass(frozen=True)
class DerivativeEstimate:
    """One-sided derivative estimates of phi at 0.

    ``steps`` holds (t, phi(t)/t) pairs, right side first, each side ordered
    by decreasing |t|.
    """

    right: float
    left: float
    steps: list[tuple[float, float]] = field(repr=False)
    gateaux: bool
    tol_used: float

    @property
    def value(self) -> float:
        return 0.5 * (self.right + self.left)

    def to_dict(self) -> dict:
        return {
            "right": self.right,
            "left": self.left,
            "gateaux": self.gateaux,
            "tol_used": self.tol_used,
            "steps": [[t, q] for t, q in self.steps],
        }


@dataclass(frozen=True)
class TangentDecomposition:
    m: int
    g: np.ndarray
    C: float
    h_tangent: TowerVector


def phi(space: TowerSpace, x: TowerVector, h: TowerVector, t: float) -> float:
    return tower_norm(space, axpy(1.0, x, t, h)) - tower_norm(space, x)


def _richardson(q: list[float]) -> float:
    # quotients at t, t/2, t/4 with error c1 t + c2 t^2 + ...
    if len(q) < 3:
        return q[-1]
    a, b, c = q[-3:]
    r1 = 2.0 * b - a
    r2 = 2.0 * c - b
    return (4.0 * r2 - r1) / 3.0


def directional_derivative(space: TowerSpace, x: TowerVector, h: TowerVector,
                           t0: float = DEFAULT_T0, halvings: int = DEFAULT_HALVINGS,
                           tol: float = 1e-6) -> DerivativeEstimate:
    if x.is_zero():
        raise ValueError("the norm is not differentiable at the origin")
    base = tower_norm(space, x)
    steps: list[tuple[float, float]] = []
    sides = []
    for sign in (1.0, -1.0):
        qs = []
        for k in range(halvings + 1):
            t = sign * t0 * 2.0 ** -k
            q = (tower_norm(space, axpy(1.0, x, t, h)) - base) / t
            qs.append(q)
            steps.append((t, q))
        sides.append(_richardson(qs))
    right, left = sides
    return DerivativeEstimate(right, left, steps, abs(right - left) <= tol, tol)


def phi_identities_check(space: TowerSpace, x: TowerVector, h: TowerVector,
                         tau: float, t: float) -> float:
    """Max absolute violation of the three scaling identities for phi."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    a = phi(space, x, tau * h, t) - phi(space, x, h, tau * t)
    b = phi(space, tau * x, tau * h, t) - tau * phi(space, x, h, t)
    c = phi(space, tau * x, h, t) - tau * phi(space, x, h, t / tau)
    return max(abs(a), abs(b), abs(c))


def pairing(g: np.ndarray, y: TowerVector) -> float:
    """<g, y> for g laid out as (base block, e_1..e_m)."""
    d = y.dim
    m = len(g) - d
    if y.degree > m and np.any(y.coords[m:]):
        raise ValueError(f"vector has support beyond level {m}")
    return float(np.dot(g[:d], y.base) + np.dot(g[d:], _pad(y.coords, m)))


def norming_functional(space: TowerSpace, x: TowerVector, m: int,
                       method: str = "analytic") -> np.ndarray:
    """Coordinates of the norming functional of x^m in X_m.

    ``analytic`` differentiates the level recurrence implicitly: each level
    map lam_k(r, u) has d lam/d r = 1/G' and d lam/d u = f'(t)/G' with
    G'(lam) = 1 - f(t) + t f'(t).  ``numeric`` takes Richardson-extrapolated
    directional derivatives along every basis vector instead.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    xm = project(x, m)
    if xm.is_zero():
        raise ValueError("x^m = 0 has no norming functional")
    d = space.base.dim
    if method == "numeric":
        g = np.empty(d + m)
        for i in range(d + m):
            e = np.zeros(d + m)
            e[i] = 1.0
            est = directional_derivative(space, xm, TowerVector(e[:d], e[d:]))
            if not est.gateaux:
                raise ArithmeticError(f"one-sided derivatives differ along basis vector {i}")
            g[i] = est.value
        return g
    if method != "analytic":
        raise ValueError(f"unknown method {method!r}")
    res = level_norm(space, xm, m)
    coords = np.ascontiguousarray(xm.coords, dtype=np.float64)
    dr, du = kernels.chain_partials(res.per_level, coords, space.schedule.params[:m])
    # suffix[k] = prod_{j>k} d lam_j / d lam_{j-1}, k = 0..m
    suffix = np.ones(m + 1)
    for k in range(m - 1, -1, -1):
        suffix[k] = suffix[k + 1] * dr[k]
    g = np.zeros(d + m)
    if suffix[0] != 0.0:
        g[:d] = suffix[0] * space.base.gradient(xm.base)
    g[d:] = suffix[1:] * du * np.sign(coords)
    return g


def tangent_decomposition(space: TowerSpace, x: TowerVector, h: TowerVector,
                          m: int) -> TangentDecomposition:
    """h = h_m + C x^m with h_m in the kernel of the norming functional."""
    if h.degree > m and np.any(h.coords[m:]):
        raise ValueError(f"direction must lie in X_{m}")
    xm = project(x, m)
    g = norming_functional(space, xm, m)
    C = pairing(g, h) / level_norm(space, xm, m).value
    return TangentDecomposition(m, g, C, axpy(1.0, project(h, m), -C, xm))


def symmetric_log_grid(t_max: float, count: int = 17, decades: float = 7.0) -> np.ndarray:
    """0 plus +/- t_max * 10^-k on a log grid; ``count`` odd."""
    half = max((count - 1) // 2, 1)
    pos = t_max * 10.0 ** -np.linspace(0.0, decades, half)
    return np.concatenate([-pos, [0.0], pos[::-1]])


def is_bj_orthogonal(space: TowerSpace, x: TowerVector, h: TowerVector,
                     tol: float = 1e-6, t_max: float = 1.0) -> bool:
    """x is BJ-orthogonal to h: phi >= -tol on a grid and phi'(0) ~ 0.

    For a convex phi a vanishing derivative at 0 already gives the global
    minimum; the grid guards against a wrong derivative estimate.
    """
    if x.is_zero() or h.is_zero():
        raise ValueError("orthogonality needs nonzero x and h")
    base = tower_norm(space, x)
    for t in symmetric_log_grid(t_max):
        if tower_norm(space, axpy(1.0, x, t, h)) - base < -tol:
            return False
    est = directional_derivative(space, x, h, tol=tol)
    return abs(est.right) <= tol and abs(est.left) <= tol


def symmetric_quotient(space: TowerSpace, x: TowerVector, h: TowerVector, t: float) -> float:
    """(|||x + t h||| + |||x - t h||| - 2 |||x|||) / t, nonnegative by convexity."""
    if t <= 0:
        raise ValueError("t must be positive")
    return (tower_norm(space, axpy(1.0, x, t, h)) + tower_norm(space, axpy(1.0, x, -t, h))
            - 2.0 * tower_norm(space, x)) / t
