import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from towernorm.shape import (
    DEFAULT_LEVELS,
    InfiniteSlopeError,
    ScheduleError,
    ShapeSchedule,
    junction_mismatch,
    make_schedule,
    shape_derivative,
    shape_eval,
    shape_sandwich_check,
)

SCHED = make_schedule(levels=DEFAULT_LEVELS)


def test_default_schedule_values():
    assert SCHED.z[:3] == (0.25, 0.0625, 0.015625)
    assert SCHED.l[:3] == (0.5, 0.25, 0.125)
    assert SCHED.s[:3] == (0.75, 0.875, 0.9375)
    f = SCHED.shape(1)
    assert f.m == 0.375
    assert f.v == 0.375
    # alpha = (1 - s)/(1 - v) = 0.25 / 0.625
    assert f.alpha == pytest.approx(0.4, abs=1e-15)
    assert f.c == pytest.approx(0.625 / 0.25 ** 0.4, rel=1e-15)


def test_pieces_by_hand():
    f = SCHED.shape(1)
    assert shape_eval(f, 0.1) == 0.0
    assert shape_eval(f, 0.4) == pytest.approx(0.15 ** 2 / 0.5, abs=1e-16)
    assert shape_eval(f, 0.6) == pytest.approx(0.6 - 0.375, abs=1e-16)
    assert shape_eval(f, 1.0) == 1.0
    assert shape_derivative(f, 0.6) == 1.0
    with pytest.raises(InfiniteSlopeError):
        shape_derivative(f, 1.0)


@pytest.mark.parametrize("n", [1, 2, 5, 10, 25, DEFAULT_LEVELS])
def test_junctions_are_c1(n):
    assert junction_mismatch(SCHED.shape(n)) <= 1e-12


@pytest.mark.parametrize("n", range(1, 11))
def test_sandwich(n):
    assert shape_sandwich_check(SCHED.shape(n), 10_000) <= 1e-12


def test_sandwich_accepts_explicit_points():
    f = SCHED.shape(3)
    assert shape_sandwich_check(f, [0.0, 0.5, 0.99, 1.0]) <= 1e-12


def test_vectorized_matches_scalar():
    f = SCHED.shape(4)
    grid = np.linspace(0.0, 1.0, 1001)
    scalar = np.array([shape_eval(f, t) for t in grid])
    assert np.max(np.abs(f.values(grid) - scalar)) <= 1e-15


@settings(max_examples=200, deadline=None)
@given(n=st.integers(1, 30), a=st.floats(0.0, 1.0), b=st.floats(0.0, 1.0),
       lam=st.floats(0.0, 1.0))
def test_convexity_on_random_chords(n, a, b, lam):
    f = SCHED.shape(n)
    mid = lam * a + (1 - lam) * b
    assert shape_eval(f, mid) <= lam * shape_eval(f, a) + (1 - lam) * shape_eval(f, b) + 1e-12


@settings(max_examples=200, deadline=None)
@given(n=st.integers(1, 30), a=st.floats(0.0, 0.999), b=st.floats(0.0, 0.999))
def test_slope_nondecreasing(n, a, b):
    f = SCHED.shape(n)
    lo, hi = min(a, b), max(a, b)
    assert shape_derivative(f, lo) <= shape_derivative(f, hi) + 1e-12


def test_uniform_convergence_to_identity():
    # sup |f_n(t) - t| on [0, 1] shrinks like m_n
    grid = np.linspace(0.0, 1.0, 2001)
    gaps = [np.max(np.abs(SCHED.shape(n).values(grid) - grid)) for n in (1, 5, 10)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] <= SCHED.offsets[9] + 1e-12


def test_roundtrip_json():
    for sched in (make_schedule(levels=5),
                  make_schedule("explicit_list", {"z": [0.1, 0.05], "l": [0.3, 0.2],
                                                  "s": [0.8, 0.9]})):
        back = ShapeSchedule.from_json(sched.to_json())
        assert back.to_dict() == sched.to_dict()
        assert np.array_equal(back.params, sched.params)


def test_json_kinds():
    d = make_schedule(levels=2).to_dict()
    assert d["kind"] == "default_geometric"
    assert json.loads(json.dumps(d))["params"]["z_ratio"] == 0.25


@pytest.mark.parametrize("z,l,s", [
    ([0.5], [0.4], [0.8]),     # z >= l
    ([0.1], [0.3], [0.2]),     # s <= l
    ([0.0], [0.3], [0.8]),     # z must be positive
    ([0.1], [0.3], [1.0]),     # s < 1
])
def test_invalid_explicit_schedule(z, l, s):
    with pytest.raises(ScheduleError):
        make_schedule("explicit_list", {"z": z, "l": l, "s": s})


def test_schedule_levels_cap():
    with pytest.raises(ScheduleError):
        make_schedule(levels=200)


def test_octahedral_constant():
    assert SCHED.octahedral_constant(3) == pytest.approx(0.140625 / 2.140625, rel=1e-15)
    assert math.isclose(SCHED.octahedral_constant(3), 0.0657, abs_tol=1e-4)
