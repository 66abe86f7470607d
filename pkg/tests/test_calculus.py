import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from towernorm.calculus import (
    directional_derivative,
    is_bj_orthogonal,
    norming_functional,
    pairing,
    phi,
    phi_identities_check,
    symmetric_log_grid,
    symmetric_quotient,
    tangent_decomposition,
)
from towernorm.norm import tower_norm
from towernorm.space import TowerVector, ell1_tail, project, random_vector

seeds = st.integers(0, 2 ** 32 - 1)


def test_phi_basics(space2):
    x = random_vector(space2, 4, "generic", 1)
    nx = tower_norm(space2, x)
    assert phi(space2, x, x, 0.0) == 0.0
    for t in (-0.5, 0.3, 2.0):
        assert phi(space2, x, x, t) == pytest.approx(t * nx, rel=1e-12)


def test_derivative_along_x_is_the_norm(space2):
    x = random_vector(space2, 5, "unit_sphere_level_n", 2)
    est = directional_derivative(space2, x, x)
    # floor of the estimator: rounding in phi(t) / t at t = 2^-20
    assert est.right == pytest.approx(1.0, abs=1e-8)
    assert est.left == pytest.approx(1.0, abs=1e-8)
    assert est.gateaux


def test_e2_is_orthogonal_to_e1(space2):
    x, h = space2.e(2), space2.e(1)
    est = directional_derivative(space2, x, h)
    assert abs(est.right) <= 1e-6 and abs(est.left) <= 1e-6
    assert is_bj_orthogonal(space2, x, h)
    assert not is_bj_orthogonal(space2, x, x)


def test_flat_region_derivative(space2):
    x = TowerVector([1.0, 0.0])
    for n in (1, 3, 8):
        est = directional_derivative(space2, x, space2.e(n))
        assert abs(est.value) <= 1e-12


def test_derivative_needs_nonzero_point(space2):
    with pytest.raises(ValueError):
        directional_derivative(space2, space2.zero(), space2.e(1))


@settings(max_examples=40, deadline=None)
@given(sx=seeds, sh=seeds, tau=st.floats(0.1, 10.0), t=st.floats(-0.5, 0.5))
def test_phi_scaling_identities(space2, sx, sh, tau, t):
    x = random_vector(space2, 4, "generic", sx)
    h = random_vector(space2, 4, "generic", sh)
    scale = max(1.0, tower_norm(space2, x) + abs(t) * tau * tower_norm(space2, h)) * tau
    assert phi_identities_check(space2, x, h, tau, t) <= 1e-10 * scale
    assert phi_identities_check(space2, x, h, 1.0, t) == 0.0


def test_norming_functional_of_unit_vectors(space2):
    g = norming_functional(space2, space2.e(3), 3)
    assert np.allclose(g, [0, 0, 0, 0, 1], atol=1e-14)
    g = norming_functional(space2, TowerVector([0.6, 0.8]), 4)
    assert np.allclose(g, [0.6, 0.8, 0, 0, 0, 0], atol=1e-14)


def test_norming_functional_analytic_matches_numeric(space):
    for seed in range(10):
        x = random_vector(space, 5, "generic", seed)
        a = norming_functional(space, x, 5)
        b = norming_functional(space, x, 5, method="numeric")
        assert np.max(np.abs(a - b)) <= 1e-7


@settings(max_examples=60, deadline=None)
@given(sx=seeds, sy=seeds, deg=st.integers(1, 8))
def test_norming_functional_is_norming(space, sx, sy, deg):
    x = random_vector(space, deg, "generic", sx)
    g = norming_functional(space, x, deg)
    nx = tower_norm(space, x)
    assert pairing(g, x) == pytest.approx(nx, rel=1e-10)
    # dual norm <= 1: <g, y> <= |||y||| for every y
    y = random_vector(space, deg, "generic", sy)
    assert pairing(g, y) <= tower_norm(space, y) * (1 + 1e-10)


def test_norming_functional_rejects_bad_input(space2):
    with pytest.raises(ValueError):
        norming_functional(space2, space2.e(1), 0)
    with pytest.raises(ValueError):
        norming_functional(space2, space2.e(3), 2)
    with pytest.raises(ValueError):
        norming_functional(space2, space2.e(1), 1, method="spline")


def test_tangent_decomposition_trivial_cases(space):
    x = random_vector(space, 4, "generic", 3)
    dec = tangent_decomposition(space, x, x, 4)
    assert dec.C == pytest.approx(1.0, abs=1e-12)
    assert tower_norm(space, dec.h_tangent) <= 1e-12
    h = random_vector(space, 4, "generic", 4)
    ht = tangent_decomposition(space, x, h, 4).h_tangent
    again = tangent_decomposition(space, x, ht, 4)
    assert abs(again.C) <= 1e-12
    assert tower_norm(space, again.h_tangent - ht) <= 1e-12


def test_tangent_direction_is_bj_orthogonal(space):
    for seed in range(10):
        x = random_vector(space, 4, "generic", seed)
        h = random_vector(space, 4, "generic", seed + 100)
        ht = tangent_decomposition(space, x, h, 4).h_tangent
        ht = ht * (1.0 / tower_norm(space, ht))
        assert is_bj_orthogonal(space, x, ht)


def test_tangent_decomposition_needs_h_in_level(space2):
    with pytest.raises(ValueError):
        tangent_decomposition(space2, space2.e(1), space2.e(3), 2)


def test_symmetric_log_grid():
    g = symmetric_log_grid(0.5, 17)
    assert len(g) == 17 and g[8] == 0.0
    assert np.allclose(g, -g[::-1])
    assert g.max() == 0.5


@settings(max_examples=50, deadline=None)
@given(sx=seeds, sh=seeds, k=st.integers(0, 30))
def test_symmetric_quotient_nonnegative(space2, sx, sh, k):
    x = random_vector(space2, 6, "generic", sx)
    h = random_vector(space2, 6, "generic", sh)
    assert symmetric_quotient(space2, x, h, 2.0 ** -k) >= -1e-12 * 2.0 ** k


def test_symmetric_quotient_decays(space2):
    x = random_vector(space2, 6, "unit_sphere_level_n", 9)
    h = random_vector(space2, 6, "generic", 10)
    trail = [symmetric_quotient(space2, x, h, 2.0 ** -k) for k in range(21)]
    assert trail[-1] <= 1e-4
    assert all(b <= a + 1e-9 for a, b in zip(trail, trail[1:]))
    assert symmetric_quotient(space2, x, x, 0.5) == pytest.approx(0.0, abs=1e-12)


def test_truncated_phi_converges(space2):
    for seed in range(20):
        x = random_vector(space2, 20, "summable_tail", seed)
        h = random_vector(space2, 3, "generic", seed + 1)
        for n in (3, 6, 10):
            for t in (-0.25, 0.01, 0.5):
                gap = abs(phi(space2, project(x, n), h, t) - phi(space2, x, h, t))
                assert gap <= 2.0 * ell1_tail(x, n) + 1e-12


def test_derivative_estimate_serializes(space2):
    d = directional_derivative(space2, space2.e(1), space2.e(2), halvings=4).to_dict()
    assert set(d) == {"right", "left", "gateaux", "tol_used", "steps"}
    assert len(d["steps"]) == 10
    assert d["steps"][0][0] > 0 > d["steps"][5][0]
