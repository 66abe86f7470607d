"""Sampled certificates for the inequalities satisfied by the tower norm.

Every check draws deterministic samples from ``(seed, check name)``, tests a
family of inequalities ``lhs <= rhs + tol`` and folds the outcome into a
:class:`VerificationReport`.  A strict inequality is tested as non-strict
with an additive tolerance.
"""

from __future__ import annotations

import math
import time
import zlib
from dataclasses import asdict, dataclass, field
from typing import Any, Callable

import numpy as np

from .calculus import (
    directional_derivative,
    norming_functional,
    pairing,
    symmetric_log_grid,
    symmetric_quotient,
    tangent_decomposition,
)
from .norm import (
    equivalence_constants,
    level_norm,
    member_ball,
    minkowski_oracle,
    tower_norm,
)
from .shape import junction_mismatch, shape_derivative, shape_eval
from .space import TowerSpace, TowerVector, axpy, ell1_tail, project, random_vector

__all__ = [
    "VerificationReport",
    "Case2Trace",
    "CHECKS",
    "octahedral_threshold",
    "verify_shape",
    "verify_structure",
    "verify_equivalence",
    "verify_octahedral",
    "verify_case1",
    "verify_case2",
    "verify_smoothness",
    "verify_all",
]

DEFAULT_SAMPLES = 500
MAX_DEGREE = 8


@dataclass
class VerificationReport:
    check_name: str
    samples: int
    violations: int
    worst_violation: float
    worst_witness: dict | None
    tolerance: float
    passed: bool
    runtime_ms: int
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


@dataclass
class Case2Trace:
    n: int
    k: int
    C_sequence: list[float]
    h_gaps: list[float]
    E_values: list[float]
    lhs: float
    rhs: float


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, TowerVector):
        return obj.to_dict()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


class _Tally:
    """Running worst-case bookkeeping for one check."""

    def __init__(self, name: str, tol: float):
        self.name = name
        self.tol = tol
        self.violations = 0
        self.margin = -math.inf
        self.worst = -math.inf
        self.witness: dict | None = None
        self.sub: dict[str, dict] = {}
        self.t0 = time.perf_counter()

    def record(self, sub: str, excess: float, witness: Callable[[], dict] | dict,
               tol: float | None = None) -> bool:
        """Register lhs - rhs = ``excess``; returns True when within tolerance."""
        tol = self.tol if tol is None else tol
        if math.isnan(excess):
            excess = math.inf
        entry = self.sub.setdefault(sub, {"count": 0, "violations": 0,
                                          "worst": -math.inf, "tolerance": tol})
        entry["count"] += 1
        entry["worst"] = max(entry["worst"], excess)
        ok = excess <= tol
        if not ok:
            self.violations += 1
            entry["violations"] += 1
        if excess - tol > self.margin:
            self.margin = excess - tol
            self.worst = excess
            w = witness() if callable(witness) else witness
            self.witness = _jsonable({"subcheck": sub, **w})
        return ok

    def report(self, samples: int, **details) -> VerificationReport:
        ms = int(round(1000 * (time.perf_counter() - self.t0)))
        details["subchecks"] = self.sub
        return VerificationReport(
            check_name=self.name,
            samples=samples,
            violations=self.violations,
            worst_violation=self.worst,
            worst_witness=self.witness,
            tolerance=self.tol,
            passed=self.violations == 0,
            runtime_ms=ms,
            details=_jsonable(details),
        )


def _rng(seed: int, tag: str) -> np.random.Generator:
    return np.random.default_rng([int(seed), zlib.crc32(tag.encode())])


def _seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2 ** 63 - 1))


def _unit(space: TowerSpace, v: TowerVector) -> TowerVector:
    return v * (1.0 / tower_norm(space, v))


def _max_degree(space: TowerSpace) -> int:
    return min(MAX_DEGREE, space.max_level)


# -- shape ----------------------------------------------------------------


def verify_shape(space: TowerSpace, samples: int | None = None, seed: int = 0,
                 tol: float = 1e-12, grid_size: int = 10_000) -> VerificationReport:
    """Sandwich, C^1 junctions, convexity and endpoint values of every f_n."""
    tally = _Tally("shape", tol)
    levels = space.schedule.levels if samples is None else min(samples, space.schedule.levels)
    grid = np.linspace(0.0, 1.0, grid_size)
    for n in range(1, levels + 1):
        f = space.schedule.shape(n)
        vals = f.values(grid)
        for i in (0, grid_size // 3, grid_size - 1):
            tally.record("scalar_path", abs(shape_eval(f, grid[i]) - vals[i]),
                         {"level": n, "t": grid[i]})
        viol = np.maximum.reduce([vals - grid, (grid - f.m) - vals, -vals])
        i = int(np.argmax(viol))
        tally.record("sandwich", float(viol[i]), {"level": n, "t": grid[i]})
        tally.record("junctions", junction_mismatch(f), {"level": n})
        inner = grid[:-1]
        slopes = np.array([shape_derivative(f, t) for t in inner[:: max(1, grid_size // 1000)]])
        d = np.diff(slopes)
        j = int(np.argmin(d))
        tally.record("convexity", float(-d[j]), {"level": n, "index": j})
        tally.record("endpoints", max(abs(shape_eval(f, f.z)), abs(shape_eval(f, 1.0) - 1.0)),
                     {"level": n})
    return tally.report(levels, grid_size=grid_size)


# -- structure ------------------------------------------------------------


def verify_structure(space: TowerSpace, samples: int | None = None, seed: int = 0,
                     tol: float = 1e-10, oracle_tol: float = 1e-8) -> VerificationReport:
    """Monotone projections, z-region invariance, oracle agreement and norm axioms."""
    samples = DEFAULT_SAMPLES if samples is None else samples
    tally = _Tally("structure", tol)
    rng = _rng(seed, "structure")
    top = _max_degree(space)
    for _ in range(samples):
        deg = int(rng.integers(1, top + 1))
        x = random_vector(space, deg, "generic", _seed(rng))
        y = random_vector(space, deg, "generic", _seed(rng))
        res = level_norm(space, x)
        nx = res.value
        scale = max(1.0, nx)
        wx = {"x": x}

        steps = np.diff(res.per_level)
        tally.record("monotone_projection", float(-steps.min()) / scale, wx)

        oracle = minkowski_oracle(space, x)
        tally.record("oracle_agreement", abs(nx - oracle) / max(nx, 1e-300), wx, oracle_tol)

        a = float(rng.uniform(-3.0, 3.0))
        tally.record("homogeneity",
                     abs(tower_norm(space, a * x) - abs(a) * nx) / max(abs(a) * nx, 1e-300),
                     {"x": x, "a": a})

        ny = tower_norm(space, y)
        s = max(1.0, nx + ny)
        tally.record("triangle", (tower_norm(space, x + y) - nx - ny) / s, {"x": x, "y": y})
        tally.record("midpoint_convexity",
                     (tower_norm(space, 0.5 * (x + y)) - 0.5 * (nx + ny)) / s, {"x": x, "y": y})

        j = int(rng.integers(1, deg + 1))
        flipped = np.array(x.coords)
        flipped[j - 1] = -flipped[j - 1]
        fres = level_norm(space, TowerVector(x.base, flipped))
        tally.record("sign_symmetry",
                     float(np.abs(fres.per_level - res.per_level).max()) / scale,
                     {"x": x, "flip": j})

        if deg < space.max_level:
            u = x * (1.0 / nx)
            e = space.e(deg + 1)
            sched = space.schedule
            t = 0.99 * sched.z[deg] * (1.0 if rng.random() < 0.5 else -1.0)
            tally.record("z_region_invariance",
                         abs(tower_norm(space, axpy(1.0, u, t, e)) - 1.0), {"x": u, "t": t})
            in_n = member_ball(space, u * 0.999, deg)
            in_n1 = member_ball(space, project(u * 0.999, deg + 1), deg + 1)
            tally.record("slice_consistency", 0.0 if in_n == in_n1 else 1.0, {"x": u})
            t = 1.5 * sched.l[deg]
            grown = tower_norm(space, axpy(1.0, u, t, e)) - 1.0
            # must strictly increase past l_{n+1}
            tally.record("strict_growth", 0.0 if grown > 0.0 else 1.0, {"x": u, "t": t}, 0.0)
    return tally.report(samples)


# -- equivalence ----------------------------------------------------------


def verify_equivalence(space: TowerSpace, samples: int | None = None, seed: int = 0,
                       tol: float = 1e-9) -> VerificationReport:
    """ell1 / prod(1 + m_n) <= |||x||| <= ell1, globally and level by level."""
    samples = DEFAULT_SAMPLES if samples is None else samples
    tally = _Tally("equivalence", tol)
    rng = _rng(seed, "equivalence")
    top = _max_degree(space)
    m = space.schedule.offsets
    for i in range(samples):
        deg = int(rng.integers(0, top + 1))
        style = "summable_tail" if i % 5 == 4 else "generic"
        x = random_vector(space, deg, style, _seed(rng))
        res = level_norm(space, x)
        ell1 = space.base.norm(x.base) + x.ell1_mass()
        prod = equivalence_constants(space, deg).product
        scale = max(1.0, ell1)
        tally.record("upper", (res.value - ell1) / scale, {"x": x})
        tally.record("lower", (ell1 / prod - res.value) / scale, {"x": x})
        for n in range(1, deg + 1):
            comp = res.per_level[n - 1] + abs(x.coords[n - 1])
            tally.record("level_upper", (res.per_level[n] - comp) / scale, {"x": x, "level": n})
            tally.record("level_lower", (comp / (1.0 + m[n - 1]) - res.per_level[n]) / scale,
                         {"x": x, "level": n})
    return tally.report(samples, product_N2=equivalence_constants(space, min(2, space.max_level)).product)


# -- octahedrality --------------------------------------------------------


def octahedral_threshold(space: TowerSpace, eps: float) -> int:
    """Smallest n with (z_n + l_n) / (z_n + l_n + 2) <= eps."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    for n in range(1, space.max_level + 1):
        if space.schedule.octahedral_constant(n) <= eps:
            return n
    raise ValueError(f"no level up to {space.max_level} reaches eps = {eps}")


def verify_octahedral(space: TowerSpace, samples: int | None = None, seed: int = 0,
                      tol: float = 1e-9, eps: float = 0.1,
                      witness_levels: list[int] | None = None) -> VerificationReport:
    """|||y + a e_n||| >= (1 - eps)(|||y||| + |a|) for y in X_{n-1}, n >= n0."""
    samples = DEFAULT_SAMPLES if samples is None else samples
    n0 = octahedral_threshold(space, eps)
    levels = witness_levels or list(range(n0, min(n0 + 3, space.max_level) + 1))
    if min(levels) < n0:
        raise ValueError(f"witness levels must be >= n0 = {n0}")
    tally = _Tally("octahedral", tol)
    rng = _rng(seed, "octahedral")
    for i in range(samples):
        n = levels[i % len(levels)]
        y = random_vector(space, n - 1, "generic", _seed(rng))
        ny = tower_norm(space, y)
        alpha = float(rng.choice([-1.0, 1.0]) * 10.0 ** rng.uniform(-2.0, 1.0)) * max(ny, 1.0)
        lhs = tower_norm(space, axpy(1.0, y, alpha, space.e(n)))
        rhs = (1.0 - eps) * (ny + abs(alpha))
        tally.record("witness", (rhs - lhs) / max(1.0, rhs), {"y": y, "alpha": alpha, "level": n})
    return tally.report(samples, n0=n0, eps=eps, levels=levels,
                        constant_at_n0=space.schedule.octahedral_constant(n0))


# -- Case 1: tangent directions -------------------------------------------


def _case1_sample(space: TowerSpace, rng: np.random.Generator, style: str, degree: int):
    x = random_vector(space, degree, style, _seed(rng))
    nx = tower_norm(space, x)
    per = level_norm(space, x).per_level
    n = next(k for k in range(1, degree + 1) if per[k] >= 0.5 * nx)
    h0 = random_vector(space, n, "generic", _seed(rng))
    h = tangent_decomposition(space, x, h0, n).h_tangent
    nh = tower_norm(space, h)
    if nh < 1e-8:
        return None
    return x, n, h * (1.0 / nh)


def verify_case1(space: TowerSpace, samples: int | None = None, seed: int = 0,
                 tol: float = 1e-8, decay_tol: float = 1e-5,
                 grid_count: int = 17) -> VerificationReport:
    """Tangent directions: BJ preservation, ratio inequality, telescoping bound."""
    samples = DEFAULT_SAMPLES if samples is None else samples
    tally = _Tally("case1", tol)
    rng = _rng(seed, "case1")
    top = _max_degree(space)
    grid = [t for t in symmetric_log_grid(1.0, grid_count) if t != 0.0]
    t_small = 2.0 ** -20
    certified = 0
    done = 0
    while done < samples:
        style = "summable_tail" if done % 2 else "generic"
        degree = min(space.max_level, 12) if style == "summable_tail" else top
        sample = _case1_sample(space, rng, style, degree)
        if sample is None:
            continue
        x, n, h = sample
        done += 1
        D = x.degree
        xs = {m: project(x, m) for m in range(n, D + 1)}
        base = {m: tower_norm(space, xs[m]) for m in xs}
        moved = {(m, t): tower_norm(space, axpy(1.0, xs[m], t, h)) for m in xs for t in grid}
        phi = {(m, t): moved[m, t] - base[m] for m in xs for t in grid}
        w = lambda **kw: {"x": x, "h": h, "n": n, **kw}  # noqa: E731

        hyp = base[n] >= 0.5 * base[D] and all(phi[n, t] >= -tol for t in grid)
        certified += hyp
        for t in grid:
            tally.record("bj_hypothesis", -phi[n, t], w(t=t))
        for m in range(n, D):
            a = abs(x.coords[m])
            f = space.schedule.shape(m + 1)
            G = lambda lam: lam * (1.0 - f(a / lam))  # noqa: E731
            for t in grid:
                tally.record("bj_preservation", -phi[m + 1, t], w(m=m + 1, t=t))
                tally.record("homothety",
                             abs(phi[m, t] - (G(moved[m + 1, t]) - G(base[m + 1]))),
                             w(m=m, t=t))
                tally.record("ratio",
                             moved[m + 1, t] / moved[m, t] - base[m + 1] / base[m],
                             w(m=m, t=t))
        for m in range(n + 1, D + 1):
            r = base[m] / base[n]
            for t in grid:
                tally.record("telescoping", phi[m, t] - r * phi[n, t], w(m=m, t=t))
                tally.record("telescoping_factor2", r * phi[n, t] - 2.0 * phi[n, t], w(m=m, t=t))
        for m in (n, D):
            for t in (t_small, -t_small):
                q = (tower_norm(space, axpy(1.0, xs[m], t, h)) - base[m]) / t
                tally.record("derivative_vanishes", abs(q), w(m=m, t=t), decay_tol)
    return tally.report(samples, hypotheses_certified=certified, grid=grid)


# -- Case 2: general directions -------------------------------------------


def _case2_sample(space: TowerSpace, rng: np.random.Generator, degree: int, retries: int = 20):
    for _ in range(retries):
        x = random_vector(space, degree, "summable_tail", _seed(rng))
        x = _unit(space, x)
        N = next((k for k in range(2, degree) if ell1_tail(x, k) < 1.0 / 16.0), None)
        if N is None or N + 2 > degree:
            continue
        h = random_vector(space, N, "generic", _seed(rng))
        if h.is_zero():
            continue
        return x, N, _unit(space, h)
    raise RuntimeError("could not construct a sample satisfying the standing hypotheses")


def verify_case2(space: TowerSpace, samples: int | None = None, seed: int = 0,
                 tol: float = 1e-8, c_tol: float = 1e-6, limit_tol: float = 1e-4,
                 degree: int = 16, grid_count: int = 17) -> VerificationReport:
    """General directions: bounds on C_m, h_m, the error terms and the final estimate."""
    samples = DEFAULT_SAMPLES if samples is None else samples
    degree = min(degree, space.max_level)
    tally = _Tally("case2", tol)
    rng = _rng(seed, "case2")
    grid = [t for t in symmetric_log_grid(15.0 / 32.0 * 0.999, grid_count) if t != 0.0]
    N_ = lambda v: tower_norm(space, v)  # noqa: E731
    trace: Case2Trace | None = None
    certified = 0
    for i in range(samples):
        x, N, h = _case2_sample(space, rng, degree)
        D = x.degree
        lv = range(N + 1, D + 1)
        xs = {m: project(x, m) for m in range(N, D + 1)}
        nxs = {m: N_(xs[m]) for m in xs}
        hyp = (abs(N_(x) - 1.0) < 1e-12 and abs(N_(h) - 1.0) < 1e-12
               and all(nxs[m] > 15.0 / 16.0 for m in lv)
               and ell1_tail(x, N) < 1.0 / 16.0)
        certified += hyp
        w = lambda **kw: {"x": x, "h": h, "N": N, **kw}  # noqa: E731

        dec = {m: tangent_decomposition(space, x, h, m) for m in lv}
        C = {m: dec[m].C for m in lv}
        hm = {m: dec[m].h_tangent for m in lv}
        for m in lv:
            tally.record("C_bound", abs(C[m]) - 16.0 / 15.0, w(m=m), c_tol)
        gaps = {}
        for m in range(N + 1, D):
            xm1 = abs(x.coords[m])
            tally.record("C_step", abs(C[m + 1] - C[m]) - 2.0 * xm1, w(m=m), tol)
            gaps[m] = N_(hm[m + 1] - hm[m])
            tally.record("h_step", gaps[m] - 4.0 * xm1, w(m=m), tol)
            for t in grid:
                y = (1.0 + t * C[m + 1]) * xs[m + 1]
                E = N_(axpy(1.0, y, t, hm[m + 1])) - N_(axpy(1.0, y, t, hm[m]))
                tally.record("E_bound", abs(E) - abs(t) * gaps[m], w(m=m, t=t), tol)

        n = N + 1
        tail_n = ell1_tail(x, n - 1)
        pn = lambda s: N_(axpy(1.0, xs[n], s, hm[n])) - nxs[n]  # noqa: E731
        phi_n = {t: N_(axpy(1.0, xs[n], t, h)) - nxs[n] for t in grid}
        worst = (-math.inf, 0.0, 0.0, 0)
        for m in lv:
            for t in grid:
                f = 1.0 + t * C[m]
                # 1/2 <= 1 + t C <= 3/2, hence 2|t|/3 <= |t / (1 + t C)| <= 2|t|
                tally.record("step_bracket",
                             max(0.5 - f, f - 1.5, 2.0 / 3.0 - 1.0 / abs(f), 1.0 / abs(f) - 2.0),
                             w(m=m, t=t), tol)
        for k in range(1, D - n + 1):
            for t in grid:
                lhs = abs(N_(axpy(1.0, xs[n + k], t, h)) - nxs[n + k] - phi_n[t])
                rhs = (16.0 * abs(t) * tail_n + 2.0 * pn(t / (1.0 + t * C[n + k]))
                       + 2.0 * pn(t / (1.0 + t * C[n])))
                tally.record("final_estimate", lhs - rhs, w(n=n, k=k, t=t), tol)
                if lhs - rhs > worst[0]:
                    worst = (lhs - rhs, lhs, rhs, k)

        est = directional_derivative(space, x, h)
        limit = C[D] * nxs[D]
        tally.record("derivative_limit", abs(est.right - limit), w(right=est.right, limit=limit),
                     limit_tol)

        if trace is None:
            t_rep = grid[-1]
            E_vals = []
            for m in range(N + 1, D):
                y = (1.0 + t_rep * C[m + 1]) * xs[m + 1]
                E_vals.append(N_(axpy(1.0, y, t_rep, hm[m + 1])) - N_(axpy(1.0, y, t_rep, hm[m])))
            trace = Case2Trace(n=n, k=D - n, C_sequence=[C[m] for m in lv],
                               h_gaps=[gaps[m] for m in range(N + 1, D)],
                               E_values=E_vals, lhs=worst[1], rhs=worst[2])
    return tally.report(samples, hypotheses_certified=certified,
                        trace=asdict(trace) if trace else None, t_grid=grid)


# -- smoothness -----------------------------------------------------------


def verify_smoothness(space: TowerSpace, samples: int | None = None, seed: int = 0,
                      tol: float = 1e-9, final_tol: float = 1e-4, gateaux_tol: float = 1e-6,
                      tail_points: int | None = None, depth: int = 20,
                      tail_degree: int = 30) -> VerificationReport:
    """Symmetric difference quotients decay at Y-points and at deep truncations."""
    samples = 100 if samples is None else samples
    tail_points = max(1, samples // 5) if tail_points is None else tail_points
    tail_degree = min(tail_degree, space.max_level)
    tally = _Tally("smoothness", tol)
    rng = _rng(seed, "smoothness")
    top = _max_degree(space)
    worst_trail: list[float] = []
    worst_final = -math.inf
    for i in range(samples + tail_points):
        tail = i >= samples
        if tail:
            x = _unit(space, random_vector(space, tail_degree, "summable_tail", _seed(rng)))
            hdeg = int(rng.integers(1, top + 1))
        else:
            x = _unit(space, random_vector(space, int(rng.integers(1, top + 1)), "generic",
                                           _seed(rng)))
            hdeg = int(rng.integers(0, x.degree + 1))
        h = random_vector(space, hdeg, "generic", _seed(rng))
        if h.is_zero():
            continue
        h = _unit(space, h)
        kind = "tail" if tail else "Y"
        w = {"x": x, "h": h, "kind": kind}
        trail = [symmetric_quotient(space, x, h, 2.0 ** -k) for k in range(depth + 1)]
        for k in range(1, depth + 1):
            tally.record("nonincreasing", trail[k] - trail[k - 1], {**w, "k": k})
        tally.record("nonnegative", -min(trail), w)
        tally.record("decay", trail[-1], w, final_tol)
        if trail[-1] > worst_final:
            worst_final, worst_trail = trail[-1], trail
        est = directional_derivative(space, x, h, tol=gateaux_tol)
        tally.record("gateaux", abs(est.right - est.left), w, gateaux_tol)
        if tail:
            D = x.degree
            g = norming_functional(space, x, D)
            limit = pairing(g, h)
            tally.record("limit_C", abs(est.right - limit),
                         {**w, "right": est.right, "limit": limit,
                          "tail_bound": ell1_tail(x, D)}, final_tol)
    return tally.report(samples + tail_points, y_points=samples, tail_points=tail_points,
                        decay_trail=worst_trail)


CHECKS: dict[str, Callable[..., VerificationReport]] = {
    "shape": verify_shape,
    "structure": verify_structure,
    "equivalence": verify_equivalence,
    "octahedral": verify_octahedral,
    "case1": verify_case1,
    "case2": verify_case2,
    "smoothness": verify_smoothness,
}


def verify_all(space: TowerSpace, samples: int | None = None, seed: int = 0,
               tol: float | None = None) -> list[VerificationReport]:
    """Run every check in :data:`CHECKS`; the suite passes iff each report does."""
    out = []
    for name, fn in CHECKS.items():
        kw: dict[str, Any] = {"samples": samples, "seed": seed}
        if tol is not None:
            kw["tol"] = tol
        out.append(fn(space, **kw))
    return out
