import math

import numpy as np
import pytest

from solvlat.errors import (
    DetNotOne,
    NotInteger,
    NotNearInteger,
    Overflow,
)
from solvlat.exactmat import ExactMatrix, quad_solve_char2
from solvlat.group import validate_diag_system
from solvlat.intlinalg import mat_mul_int
from solvlat.lattice import Lattice, LatticeElement, verify_pair, verify_pair_exact
from solvlat.scalars import Quad

LN2 = math.log(2.0)
CAT = [[2, 1], [1, 1]]


def test_verify_pair_cat_map(cat_sys, cat_system_pair):
    pair = cat_system_pair[1]
    assert pair.holonomy_list() == [CAT]
    assert pair.residual < 1e-9


def test_verify_pair_rejects_identity_sigma():
    sys = validate_diag_system([[LN2], [-LN2]])
    with pytest.raises(NotNearInteger):
        verify_pair(sys, np.eye(2), np.eye(1))


def test_verify_pair_rejects_singular_sigma(cat_sys):
    from solvlat.errors import Singular

    with pytest.raises(Singular):
        verify_pair(cat_sys, np.zeros((2, 2)), np.eye(1))


def test_verify_pair_scaled_rho_remains_compatible(cat_sys, cat_system_pair):
    pair = cat_system_pair[1]
    for q in (2, 3, 5):
        scaled = verify_pair(cat_sys, pair.sigma, q * pair.rho)
        assert scaled.holonomy_list() == [mat_pow(CAT, q)]
    lam = 2.25  # any nonzero real scaling of sigma keeps the conjugation
    scaled = verify_pair(cat_sys, lam * pair.sigma, pair.rho)
    assert scaled.holonomy_list() == [CAT]


def mat_pow(m, k):
    out = [[1, 0], [0, 1]]
    for _ in range(k):
        out = mat_mul_int(out, m)
    return out


def test_verify_pair_exact_cat(cat_exact):
    sigma, e1, sys, pair = cat_exact
    assert pair.residual == 0.0
    assert pair.holonomy_list() == [CAT]
    assert pair.sigma_exact is sigma


def test_verify_pair_exact_rejects_diag():
    e = ExactMatrix.diagonal([2, Quad(1, 0, 5) / 2], 5)
    with pytest.raises(NotInteger):
        verify_pair_exact(ExactMatrix.identity(2, 5), [e])


def test_verify_pair_exact_squares(cat_exact):
    sigma, e1, _, _ = cat_exact
    lam1, lam2 = quad_solve_char2(CAT)
    e2 = ExactMatrix.diagonal([lam1 * lam1, lam2 * lam2], 5)
    pair = verify_pair_exact(sigma, [e2])
    assert pair.holonomy_list() == [[[5, 3], [3, 2]]]


def test_verify_pair_exact_det_check(cat_exact):
    sigma = cat_exact[0]
    bad = ExactMatrix.diagonal([Quad(2, 0, 5), Quad(3, 0, 5)], 5)
    with pytest.raises(DetNotOne):
        verify_pair_exact(sigma, [bad])


def test_holonomy_basics(cat_lattice):
    lat = cat_lattice
    assert lat.holonomy([0]) == [[1, 0], [0, 1]]
    assert lat.holonomy([2]) == [[5, 3], [3, 2]]
    assert lat.holonomy([-1]) == [[1, -1], [-1, 2]]


def test_holonomy_homomorphism(cat_lattice, rng):
    lat = cat_lattice
    for _ in range(60):
        k = int(rng.integers(-8, 9))
        l = int(rng.integers(-8, 9))
        assert lat.holonomy([k + l]) == mat_mul_int(lat.holonomy([k]), lat.holonomy([l]))


def test_holonomy_budget(cat_system_pair):
    lat = Lattice(cat_system_pair[1], power_budget=100)
    with pytest.raises(Overflow):
        lat.holonomy([101])


def test_lat_mul_examples(cat_lattice):
    lat = cat_lattice
    a = lat.element([1, 0], [1])
    b = lat.element([0, 1], [0])
    assert lat.mul(a, b) == LatticeElement.of([2, 1], [1])
    e = lat.identity()
    assert lat.mul(a, e) == a
    assert lat.mul(lat.inv(a), a) == e
    assert lat.mul(a, lat.inv(a)) == e


def test_lat_inv_examples(cat_lattice):
    lat = cat_lattice
    assert lat.inv(lat.identity()) == lat.identity()
    assert lat.inv(lat.element([1, 0], [0])) == LatticeElement.of([-1, 0], [0])
    assert lat.inv(lat.element([1, 0], [1])) == LatticeElement.of([-1, 1], [-1])


def test_lat_mul_associative_exact(cat_lattice, rng):
    lat = cat_lattice
    for _ in range(200):
        a, b, c = (
            lat.element(rng.integers(-9, 9, 2), rng.integers(-5, 5, 1)) for _ in range(3)
        )
        assert lat.mul(lat.mul(a, b), c) == lat.mul(a, lat.mul(b, c))


def test_exact_float_coherence(cat_lattice, rng):
    lat = cat_lattice
    worst = 0.0
    for _ in range(500):
        a = lat.element(rng.integers(-9, 9, 2), rng.integers(-5, 6, 1))
        b = lat.element(rng.integers(-9, 9, 2), rng.integers(-5, 6, 1))
        exact = lat.to_group(lat.mul(a, b))
        floaty = lat.to_group(a) * lat.to_group(b)
        worst = max(
            worst,
            float(np.max(np.abs(exact.x - floaty.x))),
            float(np.max(np.abs(exact.t - floaty.t))),
        )
    assert worst < 1e-8


def test_membership_roundtrip(cat_lattice, rng):
    lat = cat_lattice
    for _ in range(1000):
        a = lat.element(rng.integers(-20, 21, 2), rng.integers(-5, 6, 1))
        assert lat.membership(lat.to_group(a)) == a


def test_membership_rejects(cat_lattice):
    lat = cat_lattice
    g = lat.to_group(lat.element([1, 0], [0]))
    shifted = lat.sys.element(g.x * 0.5, g.t)
    assert lat.membership(shifted) is None


def test_reduce_identity(cat_lattice):
    lat = cat_lattice
    gamma, r = lat.reduce(lat.sys.identity())
    assert gamma.is_identity
    assert np.all(r.x == 0.0) and np.all(r.t == 0.0)


def test_reduce_lattice_points(cat_lattice, rng):
    lat = cat_lattice
    for _ in range(200):
        a = lat.element(rng.integers(-9, 9, 2), rng.integers(-4, 5, 1))
        gamma, r = lat.reduce(lat.to_group(a))
        assert gamma == a
        assert np.max(np.abs(r.x)) < 1e-9 and np.max(np.abs(r.t)) < 1e-9


def test_reduce_roundtrip_random(cat_lattice, rng):
    lat = cat_lattice
    for _ in range(500):
        g = lat.sys.element(rng.uniform(-8, 8, 2), rng.uniform(-5, 5, 1))
        gamma, r = lat.reduce(g)
        # remainder lies in the fundamental boxes
        z = lat.pair.sigma @ r.x
        y = np.linalg.solve(lat.pair.rho, r.t)
        assert np.all(z >= -1e-12) and np.all(z < 1.0)
        assert np.all(y >= -1e-12) and np.all(y < 1.0)
        rec = lat.to_group(gamma) * r
        assert np.max(np.abs(rec.x - g.x)) < 1e-8
        assert np.max(np.abs(rec.t - g.t)) < 1e-8
        # second reduction: lattice part exactly trivial, remainder reproduced
        gamma2, r2 = lat.reduce(r)
        assert gamma2.is_identity
        assert np.max(np.abs(r2.x - r.x)) < 1e-12 and np.max(np.abs(r2.t - r.t)) < 1e-12


def test_reduce_overflow(cat_system_pair):
    lat = Lattice(cat_system_pair[1], power_budget=10)
    g = lat.sys.element([0.0, 0.0], [50.0])
    with pytest.raises(Overflow):
        lat.reduce(g)


def test_reduce_float_range_guard(cat_system_pair):
    lat = Lattice(cat_system_pair[1])
    g = lat.sys.element([1.0, 1.0], [5000.0])
    with pytest.raises(Overflow):
        lat.reduce(g)


def test_discreteness_witness(cat_lattice):
    lat = cat_lattice
    best = None
    for v1 in range(-3, 4):
        for v2 in range(-3, 4):
            for k in range(-3, 4):
                e = lat.element([v1, v2], [k])
                if e.is_identity:
                    continue
                dist = lat.to_group(e).norm_inf()
                best = dist if best is None else min(best, dist)
    assert best is not None and best > 0
    print(f"\ndiscreteness witness delta0 = {best:.6f}")


def test_presentation(cat_lattice):
    pres = cat_lattice.presentation()
    assert pres.fiber_generators == ("x1", "x2")
    assert pres.base_generators == ("t1",)
    n, m = 2, 1
    assert len(pres.relations) == n * (n - 1) // 2 + m * (m - 1) // 2 + n * m
    rendered = pres.rendered()
    assert "[x1, x2] = 1" in rendered
    # conjugation exponents are columns of the holonomy matrix
    assert "t1 x1 t1^-1 = x1^2 x2" in rendered
    assert "t1 x2 t1^-1 = x1 x2" in rendered


def test_presentation_relation_count_3d():
    from solvlat.factory import family_3d, from_hyperbolic

    sys, pair = from_hyperbolic([family_3d(1, 1)])
    pres = Lattice(pair).presentation()
    assert len(pres.relations) == 3 * 2 // 2 + 0 + 3 * 1
