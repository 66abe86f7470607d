"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line with the measured numbers.
Run ``python tests/test_acceptance.py`` for the summary without pytest.
"""

import functools
import sys
import time

import numpy as np
import pytest

from towernorm import verify
from towernorm.norm import equivalence_constants, minkowski_oracle, tower_norm
from towernorm.shape import make_schedule, shape_sandwich_check
from towernorm.space import BaseSpace, TowerSpace, TowerVector, random_vector

SPACE = TowerSpace(BaseSpace(3))


def _sub(rep, name):
    return rep.details["subchecks"][name]


def _clean(rep, names):
    return all(_sub(rep, n)["violations"] == 0 for n in names)


@functools.cache
def _structure():
    return verify.verify_structure(SPACE, samples=1000, seed=0, tol=1e-10)


def criterion_1():
    sched = make_schedule()
    t0 = time.perf_counter()
    worst = max(shape_sandwich_check(sched.shape(n), 10_000) for n in range(1, 11))
    dt = time.perf_counter() - t0
    return worst <= 1e-12 and dt < 1.0, f"worst violation {worst:.2e}, {dt:.3f} s"


def criterion_2():
    rng = np.random.default_rng(2)
    spaces = {d: TowerSpace(BaseSpace(d)) for d in (1, 2, 3)}
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(1000):
        sp = spaces[1 + i % 3]
        x = random_vector(sp, int(rng.integers(0, 9)), "generic", int(rng.integers(2 ** 63)))
        a, b = tower_norm(sp, x), minkowski_oracle(sp, x)
        worst = max(worst, abs(a - b) / max(a, 1e-300))
    dt = time.perf_counter() - t0
    return worst <= 1e-8 and dt < 10.0, f"max relative gap {worst:.2e}, {dt:.2f} s"


def criterion_3():
    sp = TowerSpace(BaseSpace(2))
    val = tower_norm(sp, TowerVector([1.0, 0.0], [1.0]))
    err = abs(val - 16.0 / 11.0)
    return err <= 1e-10, f"value {val!r}, error {err:.2e}"


def criterion_4():
    rep = _structure()
    ok = _clean(rep, ["monotone_projection", "z_region_invariance"])
    mp, zr = _sub(rep, "monotone_projection"), _sub(rep, "z_region_invariance")
    return ok, (f"{rep.samples} samples; monotone worst {mp['worst']:.1e}, "
                f"z-region worst {zr['worst']:.1e}")


def criterion_5():
    rep = verify.verify_equivalence(SPACE, samples=1000, seed=0, tol=1e-9)
    prod = equivalence_constants(SPACE, 2).product
    ok = rep.passed and prod == 1.58984375 and rep.details["product_N2"] == 1.58984375
    return ok, f"{rep.violations} violations, product at N=2 = {prod!r}"


def criterion_6():
    t0 = time.perf_counter()
    rep = verify.verify_octahedral(SPACE, samples=500, seed=0, tol=1e-9, eps=0.1)
    dt = time.perf_counter() - t0
    n0 = rep.details["n0"]
    ok = n0 == 3 and rep.passed and dt < 10.0
    return ok, f"n0 = {n0}, {rep.violations} violations, {dt:.2f} s"


def criterion_7():
    rep = verify.verify_case1(SPACE, samples=200, seed=0, tol=1e-8)
    cert = rep.details["hypotheses_certified"]
    decay = _sub(rep, "derivative_vanishes")["worst"]
    ok = (cert == 200 and decay < 1e-5
          and _clean(rep, ["bj_preservation", "ratio", "telescoping_factor2"]) and rep.passed)
    return ok, (f"{cert} certified, {rep.violations} violations, "
                f"phi(t)/t at 2^-20 <= {decay:.1e}")


def criterion_8():
    t0 = time.perf_counter()
    rep = verify.verify_case2(SPACE, samples=100, seed=0)
    dt = time.perf_counter() - t0
    cert = rep.details["hypotheses_certified"]
    needed = ["C_bound", "C_step", "h_step", "E_bound", "final_estimate"]
    ok = cert == 100 and _clean(rep, needed) and rep.passed and dt < 60.0
    cmax = _sub(rep, "C_bound")["worst"] + 16.0 / 15.0
    return ok, (f"{cert} certified, {rep.violations} violations, "
                f"max |C| = {cmax:.4f}, {dt:.1f} s")


def criterion_9():
    rep = verify.verify_smoothness(SPACE, samples=100, tail_points=20, seed=0)
    ok = (rep.passed and rep.details["y_points"] == 100 and rep.details["tail_points"] == 20
          and _sub(rep, "decay")["worst"] <= 1e-4 and _sub(rep, "gateaux")["worst"] <= 1e-6
          and _sub(rep, "limit_C")["worst"] <= 1e-4)
    return ok, (f"quotient at 2^-20 <= {_sub(rep, 'decay')['worst']:.1e}, "
                f"|right-left| <= {_sub(rep, 'gateaux')['worst']:.1e}, "
                f"|est - lim C| <= {_sub(rep, 'limit_C')['worst']:.1e}")


def criterion_10():
    rep = _structure()
    names = ["homogeneity", "triangle", "sign_symmetry"]
    worst = max(_sub(rep, n)["worst"] for n in names)
    return _clean(rep, names), f"{rep.samples} samples, worst excess {worst:.1e}"


CRITERIA = [
    (1, "shape sandwich", criterion_1),
    (2, "oracle equivalence", criterion_2),
    (3, "closed form 16/11", criterion_3),
    (4, "projection monotonicity and z-region invariance", criterion_4),
    (5, "equivalence sandwich and product constant", criterion_5),
    (6, "octahedrality", criterion_6),
    (7, "tangent-direction suite", criterion_7),
    (8, "general-direction suite", criterion_8),
    (9, "smoothness trend", criterion_9),
    (10, "norm axioms", criterion_10),
]


def _line(num, title, ok, info):
    return f"{'PASS' if ok else 'FAIL'} criterion {num:2d} ({title}): {info}"


@pytest.mark.parametrize("num,title,fn", CRITERIA, ids=[f"c{n}" for n, _, _ in CRITERIA])
def test_criterion(num, title, fn, capsys):
    ok, info = fn()
    with capsys.disabled():
        print("\n" + _line(num, title, ok, info), flush=True)
    assert ok, info


if __name__ == "__main__":
    results = []
    for num, title, fn in CRITERIA:
        ok, info = fn()
        results.append(ok)
        print(_line(num, title, ok, info), flush=True)
    sys.exit(0 if all(results) else 1)
