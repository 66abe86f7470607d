"""Evaluation of the tower norms.

``level_norm`` runs the homothety recurrence

    lam_0 = |x_0|,   lam_k (1 - f_k(|x_k| / lam_k)) = lam_{k-1},

one monotone scalar root per level.  ``minkowski_oracle`` computes the same
quantity by bisecting on membership in the unit ball and never calls the
root solver, so the two routes check each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .shape import ShapeFn
from .space import Tolerances, TowerSpace, TowerVector, _pad, ell1_tail

__all__ = [
    "ConvergenceError",
    "LevelNormResult",
    "EquivalenceConstants",
    "solve_level",
    "level_norm",
    "tower_norm",
    "norm_at",
    "member_ball",
    "minkowski_oracle",
    "comparison_norm",
    "ell1_sum_norm",
    "equivalence_constants",
    "truncation_bound",
]


class ConvergenceError(ArithmeticError):
    """A root or bisection solve hit its iteration cap."""


@dataclass(frozen=True)
class LevelNormResult:
    value: float
    per_level: np.ndarray
    iterations: np.ndarray


@dataclass(frozen=True)
class EquivalenceConstants:
    product: float
    tail_bound: float


def solve_level(r: float, u: float, f: ShapeFn, tol: Tolerances | None = None) -> float:
    """The unique lam >= max(r, u) with lam * (1 - f(u / lam)) = r."""
    tol = tol or Tolerances()
    if r < 0 or u < 0:
        raise ValueError("solve_level needs r >= 0 and u >= 0")
    row = np.asarray(f.row, dtype=np.float64)
    lam, it = kernels.solve_level(float(r), float(u), row, tol.rel, tol.max_iter)
    if it < 0:
        raise ConvergenceError(f"level {f.level}: no convergence for r={r!r}, u={u!r}")
    return lam


def _coords_at(x: TowerVector, n: int) -> np.ndarray:
    return np.ascontiguousarray(_pad(x.coords, n), dtype=np.float64)


def level_norm(space: TowerSpace, x: TowerVector, n: int | None = None) -> LevelNormResult:
    """|||x^n|||_n together with the whole trail |||x^k|||_k, k = 0..n."""
    n = x.degree if n is None else n
    space.check(x, n)
    coords = _coords_at(x, n)
    per, iters = kernels.level_chain(space.base.norm(x.base), coords,
                                     space.schedule.params[:n], space.tol.rel,
                                     space.tol.max_iter)
    if n and iters.min() < 0:
        k = int(np.argmin(iters)) + 1
        raise ConvergenceError(f"level {k}: root solve did not converge for {x!r}")
    return LevelNormResult(float(per[n]), per, iters)


def tower_norm(space: TowerSpace, x: TowerVector) -> float:
    """|||x|||: the sup over n is attained at the top of the support."""
    return level_norm(space, x).value


def norm_at(space: TowerSpace, base_norm: float, coords: np.ndarray) -> float:
    """Fast path for callers that already hold a padded coordinate array."""
    per, iters = kernels.level_chain(base_norm, coords,
                                     space.schedule.params[: len(coords)],
                                     space.tol.rel, space.tol.max_iter)
    if len(coords) and iters.min() < 0:
        raise ConvergenceError("root solve did not converge")
    return float(per[-1])


def member_ball(space: TowerSpace, x: TowerVector, n: int) -> bool:
    """Is x^n in the level-n unit ball?  Recursive test, no root solving."""
    space.check(x, n)
    return kernels.member_ball(space.base.norm(x.base), _coords_at(x, n),
                               space.schedule.params[:n], 1.0)


def minkowski_oracle(space: TowerSpace, x: TowerVector, n: int | None = None,
                     tol: Tolerances | None = None) -> float:
    """inf{lam > 0 : x^n / lam in B_n} by bisection on membership."""
    n = x.degree if n is None else n
    tol = tol or space.tol
    space.check(x, n)
    coords = _coords_at(x, n)
    b = space.base.norm(x.base)
    upper = b + float(np.abs(coords).sum())
    if upper == 0.0:
        return 0.0
    prod = equivalence_constants(space, n).product
    lam, it = kernels.bisect_norm(b, coords, space.schedule.params[:n],
                                  upper / prod, upper, tol.rel, tol.max_iter)
    if it < 0:
        raise ConvergenceError(f"membership bisection did not converge for {x!r}")
    return lam


def comparison_norm(space: TowerSpace, x: TowerVector, n: int) -> float:
    """|x^n|_n = |||x^{n-1}|||_{n-1} + |x_n|."""
    if n < 1:
        raise ValueError("comparison norm is defined for n >= 1")
    return level_norm(space, x, n - 1).value + abs(x.coord(n))


def ell1_sum_norm(space: TowerSpace, x: TowerVector) -> float:
    """|x_0| + sum_j |x_j|."""
    return space.base.norm(x.base) + x.ell1_mass()


def equivalence_constants(space: TowerSpace, N: int) -> EquivalenceConstants:
    """prod_{n<=N} (1 + m_n) and a bound on the omitted factors.

    For geometric schedules the tail bound is exp(sum_{n>N} m_n) in closed
    form; for explicit lists it is the product of the remaining listed
    factors (nothing is known past the list).
    """
    sched = space.schedule
    if not 0 <= N <= sched.levels:
        raise ValueError(f"N = {N} outside 0..{sched.levels}")
    m = sched.offsets
    product = float(np.prod(1.0 + m[:N]))
    if sched.kind == "default_geometric":
        zr, lr = sched.generator["z_ratio"], sched.generator["l_ratio"]
        tail = 0.5 * (zr ** (N + 1) / (1.0 - zr) + lr ** (N + 1) / (1.0 - lr))
        tail_bound = math.exp(tail)
    else:
        tail_bound = float(np.prod(1.0 + m[N:]))
    return EquivalenceConstants(product, tail_bound)


def truncation_bound(x: TowerVector, n: int) -> float:
    """| |||x||| - |||x^n||| | <= sum_{j>n} |x_j|."""
    return ell1_tail(x, n)
