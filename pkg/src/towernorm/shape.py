"""Shape functions f_n and the parameter schedules (z_n, l_n, s_n).

Each f_n is C^1, convex and nondecreasing on [0, 1], built from four pieces::

    0                          on [0, z]
    (t - z)^2 / (2 (l - z))    on [z, l]
    t - m                      on [l, s],   m = (z + l) / 2
    1 - c (1 - t)^alpha        on [s, 1]

The endcap exponent ``alpha = (1 - s) / (1 - v)`` with ``v = s - m`` makes the
value and slope match at ``s`` while the slope blows up at ``t = 1``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Sequence

import numpy as np

from . import kernels

__all__ = [
    "DEFAULT_LEVELS",
    "ScheduleError",
    "InfiniteSlopeError",
    "ShapeSchedule",
    "ShapeFn",
    "make_schedule",
    "shape_eval",
    "shape_derivative",
    "shape_sandwich_check",
    "junction_mismatch",
]

DEFAULT_LEVELS = 40

GEOMETRIC_DEFAULTS = {"z_ratio": 0.25, "l_ratio": 0.5, "s_gap": 0.5}


class ScheduleError(ValueError):
    """A schedule violates one of the ordering or monotonicity constraints."""

    def __init__(self, index: int, constraint: str):
        self.index = index
        self.constraint = constraint
        super().__init__(f"schedule invalid at level {index}: {constraint}")


class InfiniteSlopeError(ArithmeticError):
    """The derivative of a shape function at t = 1 is +infinity."""


@dataclass(frozen=True)
class ShapeFn:
    level: int
    z: float
    l: float
    s: float
    m: float
    v: float
    alpha: float
    c: float

    @classmethod
    def from_triple(cls, level: int, z: float, l: float, s: float) -> "ShapeFn":
        m = 0.5 * (z + l)
        v = s - m
        alpha = (1.0 - s) / (1.0 - v)
        c = (1.0 - v) / (1.0 - s) ** alpha
        return cls(level, z, l, s, m, v, alpha, c)

    @property
    def row(self) -> tuple[float, ...]:
        return (self.z, self.l, self.s, self.m, self.v, self.alpha, self.c)

    def __call__(self, t: float) -> float:
        return shape_eval(self, t)

    def values(self, t: np.ndarray) -> np.ndarray:
        """Vectorised evaluation on an array of points in [0, 1]."""
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        quad = (t > self.z) & (t <= self.l)
        lin = (t > self.l) & (t <= self.s)
        cap = t > self.s
        out[quad] = (t[quad] - self.z) ** 2 / (2.0 * (self.l - self.z))
        out[lin] = t[lin] - self.m
        out[cap] = 1.0 - self.c * (1.0 - t[cap]) ** self.alpha
        return out


@dataclass(frozen=True)
class ShapeSchedule:
    levels: int
    z: tuple[float, ...]
    l: tuple[float, ...]
    s: tuple[float, ...]
    kind: str = "explicit_list"
    generator: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        _validate(self.levels, self.z, self.l, self.s)

    def shape(self, n: int) -> ShapeFn:
        if not 1 <= n <= self.levels:
            raise IndexError(f"level {n} outside 1..{self.levels}")
        return ShapeFn.from_triple(n, self.z[n - 1], self.l[n - 1], self.s[n - 1])

    @cached_property
    def params(self) -> np.ndarray:
        """(levels, 7) array of kernel rows (z, l, s, m, v, alpha, c)."""
        rows = np.array([self.shape(n).row for n in range(1, self.levels + 1)])
        rows = np.ascontiguousarray(rows, dtype=np.float64)
        rows.setflags(write=False)
        return rows

    @cached_property
    def offsets(self) -> np.ndarray:
        """m_n = (z_n + l_n) / 2 for n = 1..levels."""
        return 0.5 * (np.asarray(self.z) + np.asarray(self.l))

    def octahedral_constant(self, n: int) -> float:
        """(z_n + l_n) / (z_n + l_n + 2)."""
        a = self.z[n - 1] + self.l[n - 1]
        return a / (a + 2.0)

    def to_dict(self) -> dict[str, Any]:
        kind = "explicit" if self.kind == "explicit_list" else self.kind
        out: dict[str, Any] = {
            "kind": kind,
            "levels": self.levels,
            "z": list(self.z),
            "l": list(self.l),
            "s": list(self.s),
        }
        if self.generator:
            out["params"] = dict(self.generator)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ShapeSchedule":
        kind = data.get("kind", "default_geometric")
        if kind == "default_geometric":
            return make_schedule(kind, data.get("params"),
                                 int(data.get("levels", DEFAULT_LEVELS)))
        if kind in ("explicit", "explicit_list"):
            params = {k: data[k] for k in ("z", "l", "s")}
            return make_schedule("explicit_list", params,
                                 int(data.get("levels", len(data["z"]))))
        raise ValueError(f"unknown schedule kind {kind!r}")

    @classmethod
    def from_json(cls, text: str) -> "ShapeSchedule":
        return cls.from_dict(json.loads(text))


def _validate(levels, z, l, s) -> None:
    if levels < 1:
        raise ScheduleError(0, "levels must be >= 1")
    for name, seq in (("z", z), ("l", l), ("s", s)):
        if len(seq) < levels:
            raise ScheduleError(len(seq) + 1, f"{name} has only {len(seq)} entries")
    for i in range(levels):
        n = i + 1
        if not all(math.isfinite(v) for v in (z[i], l[i], s[i])):
            raise ScheduleError(n, "non-finite entry")
        if not 0.0 < z[i]:
            raise ScheduleError(n, "0 < z_n")
        if not z[i] < l[i]:
            raise ScheduleError(n, "z_n < l_n")
        if not l[i] < s[i]:
            raise ScheduleError(n, "l_n < s_n")
        if not s[i] < 1.0:
            raise ScheduleError(n, "s_n < 1")
        if i > 0:
            if not z[i] < z[i - 1]:
                raise ScheduleError(n, "z strictly decreasing")
            if not l[i] < l[i - 1]:
                raise ScheduleError(n, "l strictly decreasing")
            if not s[i] > s[i - 1]:
                raise ScheduleError(n, "s strictly increasing")


def make_schedule(kind: str = "default_geometric",
                  params: dict[str, Any] | None = None,
                  levels: int | None = None) -> ShapeSchedule:
    """Build and validate a schedule.

    ``default_geometric`` uses ``z_n = z_ratio**n``, ``l_n = l_ratio**n`` and
    ``s_n = 1 - s_gap**(n + 1)``; the defaults (1/4, 1/2, 1/2) give
    ``z_n = 4^-n, l_n = 2^-n, s_n = 1 - 2^-(n+1)``.  Any ``l_ratio < 1`` makes
    ``sum l_n`` a convergent geometric series.  ``explicit_list`` takes the
    ``z``, ``l``, ``s`` sequences verbatim; only the given prefix is checked.
    ``levels`` defaults to 40 for generated schedules and to the list length
    for explicit ones.
    """
    if levels is None:
        levels = len(params["z"]) if kind != "default_geometric" and params else DEFAULT_LEVELS
    if levels < 1:
        raise ScheduleError(0, "levels must be >= 1")
    if kind == "default_geometric":
        gen = dict(GEOMETRIC_DEFAULTS)
        gen.update(params or {})
        if not 0.0 < gen["l_ratio"] < 1.0:
            raise ScheduleError(1, "l_ratio in (0, 1) (summability of l_n)")
        n = np.arange(1, levels + 1, dtype=float)
        z = tuple(float(v) for v in gen["z_ratio"] ** n)
        l = tuple(float(v) for v in gen["l_ratio"] ** n)
        s = tuple(float(v) for v in 1.0 - gen["s_gap"] ** (n + 1))
        return ShapeSchedule(levels, z, l, s, "default_geometric", gen)
    if kind in ("explicit_list", "explicit"):
        if not params:
            raise ValueError("explicit_list needs z, l, s sequences")
        z, l, s = (tuple(float(v) for v in params[k]) for k in ("z", "l", "s"))
        return ShapeSchedule(levels, z[:levels], l[:levels], s[:levels], "explicit_list")
    raise ValueError(f"unknown schedule kind {kind!r}")


def shape_eval(f: ShapeFn, t: float) -> float:
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t = {t} outside [0, 1]")
    return kernels.shape_value(f.z, f.l, f.s, f.m, f.alpha, f.c, float(t))


def shape_derivative(f: ShapeFn, t: float) -> float:
    if t == 1.0:
        raise InfiniteSlopeError(f"f_{f.level}'(1) is infinite")
    if not 0.0 <= t < 1.0:
        raise ValueError(f"t = {t} outside [0, 1)")
    return kernels.shape_slope(f.z, f.l, f.s, f.m, f.alpha, f.c, float(t))


def shape_sandwich_check(f: ShapeFn, grid_size: int | Sequence[float] = 10_000) -> float:
    """Largest violation of max(0, t - m) <= f(t) <= t over a grid.

    ``grid_size`` is either a point count for a uniform grid on [0, 1] or an
    explicit sequence of points.
    """
    if isinstance(grid_size, (int, np.integer)):
        if grid_size < 2:
            raise ValueError("grid_size must be >= 2")
        t = np.linspace(0.0, 1.0, int(grid_size))
    else:
        t = np.asarray(grid_size, dtype=float)
    vals = np.array([shape_eval(f, ti) for ti in t])
    viol = np.maximum.reduce([vals - t, (t - f.m) - vals, -vals])
    return float(viol.max())


def junction_mismatch(f: ShapeFn) -> float:
    """Max value/slope jump across the junctions z, l, s (one-sided formulas)."""
    z, l, s, m = f.z, f.l, f.s, f.m
    quad = lambda t: (t - z) ** 2 / (2.0 * (l - z))  # noqa: E731
    dquad = lambda t: (t - z) / (l - z)  # noqa: E731
    cap = lambda t: 1.0 - f.c * (1.0 - t) ** f.alpha  # noqa: E731
    dcap = lambda t: f.c * f.alpha * (1.0 - t) ** (f.alpha - 1.0)  # noqa: E731
    gaps = [
        abs(quad(z) - 0.0), abs(dquad(z) - 0.0),
        abs(quad(l) - (l - m)), abs(dquad(l) - 1.0),
        abs(cap(s) - (s - m)), abs(dcap(s) - 1.0),
    ]
    return max(gaps)
