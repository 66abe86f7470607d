"""The ambient space X = X0 + l1 at desk scale.

A point of X_N is a base vector in R^d (the X0 part, Euclidean norm) plus
finitely many l1 coordinates x_1..x_N.  Points of X outside every X_N are
represented by deep truncations together with their l1 tail mass.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .shape import DEFAULT_LEVELS, ShapeSchedule, make_schedule

__all__ = [
    "BaseSpace",
    "Tolerances",
    "TowerVector",
    "TowerSpace",
    "project",
    "ell1_tail",
    "axpy",
    "unit",
    "random_vector",
    "vectors_to_csv",
    "vectors_from_csv",
    "TAIL_SCALE",
]

# |x_j| <= TAIL_SCALE * 3**-j for summable_tail samples
TAIL_SCALE = 1.0


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BaseSpace:
    dim: int = 2
    norm_kind: str = "euclidean"

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("base dimension must be >= 1")
        if self.norm_kind != "euclidean":
            raise ValueError(f"unsupported base norm {self.norm_kind!r}")

    def norm(self, v: np.ndarray) -> float:
        return float(np.linalg.norm(v))

    def gradient(self, v: np.ndarray) -> np.ndarray:
        nv = self.norm(v)
        if nv == 0.0:
            raise ZeroDivisionError("base norm is not differentiable at 0")
        return np.asarray(v, dtype=float) / nv


@dataclass(frozen=True, eq=False)
class TowerVector:
    base: np.ndarray
    coords: np.ndarray = field(default_factory=lambda: _frozen([]))

    def __post_init__(self) -> None:
        object.__setattr__(self, "base", _frozen(self.base))
        object.__setattr__(self, "coords", _frozen(self.coords))

    @property
    def degree(self) -> int:
        return len(self.coords)

    @property
    def dim(self) -> int:
        return len(self.base)

    def coord(self, j: int) -> float:
        """x_j (1-based); zero beyond the stored support."""
        return float(self.coords[j - 1]) if 1 <= j <= self.degree else 0.0

    def ell1_mass(self) -> float:
        return float(np.abs(self.coords).sum())

    def is_zero(self) -> bool:
        return not (np.any(self.base) or np.any(self.coords))

    def __add__(self, other: "TowerVector") -> "TowerVector":
        return axpy(1.0, self, 1.0, other)

    def __sub__(self, other: "TowerVector") -> "TowerVector":
        return axpy(1.0, self, -1.0, other)

    def __mul__(self, a: float) -> "TowerVector":
        return TowerVector(a * self.base, a * self.coords)

    __rmul__ = __mul__

    def __neg__(self) -> "TowerVector":
        return self * -1.0

    def __eq__(self, other) -> bool:
        if not isinstance(other, TowerVector):
            return NotImplemented
        if self.dim != other.dim:
            return False
        n = max(self.degree, other.degree)
        return bool(np.array_equal(self.base, other.base)
                    and np.array_equal(_pad(self.coords, n), _pad(other.coords, n)))

    def __repr__(self) -> str:
        return f"TowerVector(base={self.base.tolist()}, coords={self.coords.tolist()})"

    def to_dict(self) -> dict:
        return {"base": self.base.tolist(), "coords": self.coords.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "TowerVector":
        if "base" not in data:
            raise ValueError("vector JSON needs a 'base' array")
        return cls(np.asarray(data["base"], dtype=float),
                   np.asarray(data.get("coords", []), dtype=float))

    @classmethod
    def from_json(cls, text: str) -> "TowerVector":
        return cls.from_dict(json.loads(text))


def _pad(a: np.ndarray, n: int) -> np.ndarray:
    if len(a) >= n:
        return np.asarray(a[:n], dtype=float)
    out = np.zeros(n)
    out[: len(a)] = a
    return out


def unit(dim: int, j: int) -> TowerVector:
    """e_j (j >= 1) in the l1 part, or the zero vector for j = 0."""
    coords = np.zeros(j)
    if j >= 1:
        coords[j - 1] = 1.0
    return TowerVector(np.zeros(dim), coords)


@dataclass(frozen=True)
class Tolerances:
    rel: float = 1e-12
    max_iter: int = 200

    def __post_init__(self) -> None:
        if not 0.0 < self.rel <= 1e-6:
            raise ValueError("tol.rel must lie in (0, 1e-6]")
        if self.max_iter < 50:
            raise ValueError("max_iter must be >= 50")


@dataclass(frozen=True)
class TowerSpace:
    base: BaseSpace = field(default_factory=BaseSpace)
    schedule: ShapeSchedule = field(default_factory=lambda: make_schedule("default_geometric",
                                                                           levels=DEFAULT_LEVELS))
    tol: Tolerances = field(default_factory=Tolerances)
    seed: int = 0

    @property
    def max_level(self) -> int:
        return self.schedule.levels

    def check(self, x: TowerVector, n: int | None = None) -> None:
        if x.dim != self.base.dim:
            raise ValueError(f"base dimension {x.dim} != space dimension {self.base.dim}")
        level = x.degree if n is None else n
        if level > self.max_level:
            raise ValueError(f"level {level} exceeds schedule depth {self.max_level}")

    def zero(self) -> TowerVector:
        return TowerVector(np.zeros(self.base.dim), [])

    def e(self, j: int) -> TowerVector:
        return unit(self.base.dim, j)


def project(x: TowerVector, n: int) -> TowerVector:
    """x^n = P_n x, stored with exactly n coordinates."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return TowerVector(x.base, _pad(x.coords, n))


def ell1_tail(x: TowerVector, n: int) -> float:
    """sum_{j > n} |x_j|."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return float(np.abs(x.coords[n:]).sum())


def axpy(a: float, x: TowerVector, b: float, y: TowerVector) -> TowerVector:
    if x.dim != y.dim:
        raise ValueError(f"base dimension mismatch: {x.dim} vs {y.dim}")
    n = max(x.degree, y.degree)
    return TowerVector(a * x.base + b * y.base,
                       a * _pad(x.coords, n) + b * _pad(y.coords, n))


def random_vector(space: TowerSpace, degree: int, style: str = "generic",
                  seed: int | Sequence[int] = 0) -> TowerVector:
    """Deterministic sample of X_degree.

    generic
        base and coordinates i.i.d. uniform on [-1, 1].
    unit_sphere_level_n
        a generic draw rescaled to tower norm 1 at level ``degree``.
    summable_tail
        coordinates with |x_j| <= TAIL_SCALE * 3**-j, a deep truncation
        standing in for a point of X outside every X_n.
    """
    if not 0 <= degree <= space.max_level:
        raise ValueError(f"degree {degree} outside 0..{space.max_level}")
    rng = np.random.default_rng(seed)
    base = rng.uniform(-1.0, 1.0, space.base.dim)
    if style == "generic":
        return TowerVector(base, rng.uniform(-1.0, 1.0, degree))
    if style == "unit_sphere_level_n":
        x = TowerVector(base, rng.uniform(-1.0, 1.0, degree))
        from .norm import level_norm

        return x * (1.0 / level_norm(space, x, degree).value)
    if style == "summable_tail":
        j = np.arange(1, degree + 1)
        coords = TAIL_SCALE * 3.0 ** (-j) * rng.uniform(-1.0, 1.0, degree)
        return TowerVector(base, coords)
    raise ValueError(f"unknown sample style {style!r}")


def vectors_to_csv(vectors: Iterable[TowerVector], path) -> None:
    """One row per vector: base_1..base_d, x_1..x_N (ragged rows allowed)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for v in vectors:
            w.writerow([repr(float(a)) for a in v.base] + [repr(float(a)) for a in v.coords])


def vectors_from_csv(path, base_dim: int) -> list[TowerVector]:
    out = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].startswith("#"):
                continue
            vals = [float(a) for a in row if a.strip() != ""]
            if len(vals) < base_dim:
                raise ValueError(f"line {lineno}: expected at least {base_dim} values")
            out.append(TowerVector(vals[:base_dim], vals[base_dim:]))
    return out
