import math

import numpy as np
import pytest

from solvlat.errors import (
    Degenerate,
    DetNotOne,
    EigenvalueOne,
    NotCommuting,
    NotHyperbolic,
    NonPositiveSpectrum,
    RepeatedEigenvalue,
)
from solvlat.factory import (
    HyperbolicInput,
    family_3d,
    from_hyperbolic,
    from_hyperbolic_exact_2d,
)
from solvlat.intlinalg import det_int, mat_mul_int
from solvlat.scalars import Quad

CAT = [[2, 1], [1, 1]]
GOLDEN = (3 + math.sqrt(5)) / 2


def test_cat_map_eigenvalues(cat_system_pair):
    sys, pair = cat_system_pair
    lams = np.exp(sys.d[:, 0])
    assert abs(lams[0] - GOLDEN) < 1e-12
    assert abs(lams[1] - 1 / GOLDEN) < 1e-12
    assert pair.holonomy_list() == [CAT]
    assert pair.residual < 1e-9


def test_tracelessness_asserted(cat_sys):
    assert abs(cat_sys.d[:, 0].sum()) < 1e-10


def test_eigenvalue_product_one():
    for mats in ([CAT], [family_3d(1, 2)], [family_3d(2, 3)]):
        sys, pair = from_hyperbolic(mats)
        for j in range(sys.m):
            assert abs(np.prod(np.exp(sys.d[:, j])) - 1.0) < 1e-10


def test_column_pairing_consistency():
    sys, pair = from_hyperbolic([family_3d(2, 1)])
    a = np.array(family_3d(2, 1), dtype=float)
    lams = np.exp(sys.d[:, 0])
    for i in range(3):
        col = pair.sigma[:, i]
        assert np.max(np.abs(a @ col - lams[i] * col)) < 1e-7
    assert np.all(np.diff(lams) < 0)  # strictly decreasing order


def test_rejections():
    with pytest.raises(RepeatedEigenvalue):
        from_hyperbolic([[[1, 0], [0, 1]]])
    with pytest.raises(NonPositiveSpectrum):
        from_hyperbolic([[[0, -1], [1, 0]]])
    with pytest.raises(DetNotOne):
        from_hyperbolic([[[1, 1], [1, 1]]])
    with pytest.raises(DetNotOne):
        from_hyperbolic([[[2, 0], [0, 3]]])
    with pytest.raises(NotCommuting):
        from_hyperbolic([CAT, [[1, 1], [0, 1]]])


def test_eigenvalue_one_rejected():
    # spectrum {1, (3 +- sqrt5)/2}: positive, distinct, det 1, but 1 is present
    block = [[1, 0, 0], [0, 0, -1], [0, 1, 3]]
    assert det_int(block) == 1
    with pytest.raises(EigenvalueOne):
        from_hyperbolic([block])


def test_commuting_powers_rejected_by_rank():
    # A and A^2 commute but give a rank-deficient diagonal system
    from solvlat.errors import InvalidDiagSystem

    with pytest.raises(InvalidDiagSystem) as exc:
        from_hyperbolic([CAT, mat_mul_int(CAT, CAT)])
    assert "RankDeficientOmega" in exc.value.codes


def test_hyperbolic_input_record():
    rec = HyperbolicInput.gather([CAT])
    assert rec.commuting and rec.det_one and rec.positive_spectrum and rec.distinct_spectrum
    rec = HyperbolicInput.gather([[[0, -1], [1, 0]]])
    assert rec.det_one and not rec.positive_spectrum


def test_reanchoring_is_exact():
    for mats in ([CAT], [family_3d(1, 1)], [family_3d(3, 2)]):
        sys, pair = from_hyperbolic(mats)
        assert pair.holonomy_list() == mats


# ---------------------------------------------------------------------------
# exact 2d path
# ---------------------------------------------------------------------------

def test_exact_2d_paper_matrix(cat_exact):
    sigma, e1, sys, pair = cat_exact
    assert pair.residual == 0.0
    assert pair.holonomy_list() == [CAT]
    # verbatim column entries from the eigenbasis, consistent decreasing order
    phi = Quad(1, 1, 5) * Quad(1, 0, 5) / 2  # (1+sqrt5)/2
    assert sigma[0, 0] == phi
    assert sigma[0, 1] == 1 - phi
    assert sigma[1, 0] == 1 and sigma[1, 1] == 1
    lam1 = e1[0, 0]
    assert lam1 == Quad(1, 0, 5) * 3 / 2 + Quad(0, 1, 5) / 2


def test_exact_2d_q3_field():
    sigma, e1, sys, pair = from_hyperbolic_exact_2d([[3, 1], [2, 1]])
    assert sigma.field_d == 3
    assert pair.residual == 0.0
    assert pair.holonomy_list() == [[[3, 1], [2, 1]]]


def test_exact_2d_rejects_non_hyperbolic():
    with pytest.raises(NotHyperbolic):
        from_hyperbolic_exact_2d([[1, 1], [-1, 0]])  # trace 1
    with pytest.raises(DetNotOne):
        from_hyperbolic_exact_2d([[1, 1], [1, 1]])


def test_exact_2d_matches_float_path():
    for a in (CAT, [[3, 1], [2, 1]], [[5, 2], [2, 1]]):
        sigma, e1, sys_e, pair_e = from_hyperbolic_exact_2d(a)
        sys_f, pair_f = from_hyperbolic([a])
        assert pair_e.holonomy_list() == pair_f.holonomy_list() == [a]
        assert np.max(np.abs(np.sort(sys_e.d[:, 0]) - np.sort(sys_f.d[:, 0]))) < 1e-12


# ---------------------------------------------------------------------------
# the 3x3 family
# ---------------------------------------------------------------------------

def test_family_3d_value():
    assert family_3d(1, 1) == [[2, 0, 1], [0, 1, 1], [1, 1, 2]]


def test_family_3d_determinants_exact():
    for k in range(-50, 51):
        for l in range(-50, 51):
            if k == 0 or l == 0:
                continue
            assert det_int(family_3d(k, l)) == 1


def test_family_3d_degenerate():
    with pytest.raises(Degenerate):
        family_3d(0, 1)
    with pytest.raises(Degenerate):
        family_3d(2, 0)


def test_family_3d_verify_pair_grid(cat_sys):
    for k in (1, 2, 3):
        for l in (1, 2, 3):
            sys, pair = from_hyperbolic([family_3d(k, l)])
            assert pair.residual < 1e-6
            lams = np.exp(sys.d[:, 0])
            assert np.all(lams > 0)
            assert np.min(np.abs(lams - 1.0)) > 1e-6
            assert np.min(np.abs(np.diff(np.sort(lams)))) > 1e-6
