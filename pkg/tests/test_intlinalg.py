import itertools
import math
import random
from fractions import Fraction

import pytest

from solvlat.errors import Singular
from solvlat.exactmat import ExactMatrix
from solvlat.intlinalg import (
    IntLattice,
    det_int,
    hnf,
    inverse_unimodular,
    lattice_intersect,
    mat_mul_int,
    mat_pow_int,
    matrix_in_GLQ,
    reconstruct_fraction,
    snf,
    zrank_intersection,
)
from solvlat.scalars import Quad


def rand_int_matrix(rnd, rows, cols, lo=-9, hi=9):
    return [[rnd.randint(lo, hi) for _ in range(cols)] for _ in range(rows)]


def is_hnf(h):
    rows, cols = len(h), len(h[0])
    pivots = []
    last = -1
    for i in range(rows):
        nz = [j for j in range(cols) if h[i][j] != 0]
        if not nz:
            assert all(all(x == 0 for x in h[k]) for k in range(i, rows))
            break
        j = nz[0]
        assert j > last, "pivots must move right"
        last = j
        assert h[i][j] > 0, "pivots must be positive"
        for k in range(i):
            assert 0 <= h[k][j] < h[i][j], "entries above pivots reduced into [0, pivot)"
        pivots.append(j)
    return True


def rows_mutually_solvable(m1, m2):
    """Every row of m1 is an integer combination of the rows of m2 (square case)."""
    a = ExactMatrix.from_int_matrix(m2).transpose()
    for row in m1:
        sol = a.solve(ExactMatrix([[x] for x in row]))
        if not sol.is_integer:
            return False
    return True


def test_hnf_trivial_examples():
    h, u = hnf([[2, 0], [0, 2]])
    assert h == [[2, 0], [0, 2]]
    assert mat_mul_int(u, [[2, 0], [0, 2]]) == h
    h, u = hnf([[0, 1], [1, 0]])
    assert h == [[1, 0], [0, 1]]


def test_hnf_det_preserved_example():
    m = [[4, 6], [2, 2]]
    h, u = hnf(m)
    assert abs(det_int(h)) == abs(det_int(m)) == 4
    assert det_int(u) in (1, -1)
    assert mat_mul_int(u, m) == h
    assert rows_mutually_solvable(h, m) and rows_mutually_solvable(m, h)
    assert is_hnf(h)


def test_hnf_randomized_properties():
    rnd = random.Random(2)
    for _ in range(60):
        rows = rnd.randint(1, 4)
        cols = rnd.randint(1, 4)
        m = rand_int_matrix(rnd, rows, cols)
        h, u = hnf(m)
        assert det_int(u) in (1, -1)
        assert mat_mul_int(u, m) == h
        assert is_hnf(h)
        if rows == cols and det_int(m) != 0:
            assert abs(det_int(h)) == abs(det_int(m))
            assert rows_mutually_solvable(h, m) and rows_mutually_solvable(m, h)


def minor_gcd_chain(m, k):
    """gcd of all k x k minors; the independent Smith-form oracle."""
    rows, cols = len(m), len(m[0])
    g = 0
    for ri in itertools.combinations(range(rows), k):
        for ci in itertools.combinations(range(cols), k):
            sub = [[m[i][j] for j in ci] for i in ri]
            g = math.gcd(g, det_int(sub))
    return g


def test_snf_examples():
    s, u, v = snf([[1, 0], [0, 1]])
    assert s == [[1, 0], [0, 1]]
    s, u, v = snf([[2, 0], [0, 3]])
    assert s == [[1, 0], [0, 6]]
    s, u, v = snf([[2, 0], [0, 2]])
    assert s == [[2, 0], [0, 2]]


def test_snf_randomized_vs_minor_gcd_oracle():
    rnd = random.Random(4)
    for _ in range(40):
        rows = rnd.randint(1, 4)
        cols = rnd.randint(1, 4)
        m = rand_int_matrix(rnd, rows, cols, -6, 6)
        s, u, v = snf(m)
        assert det_int(u) in (1, -1) and det_int(v) in (1, -1)
        assert mat_mul_int(mat_mul_int(u, m), v) == s
        diag = [s[i][i] for i in range(min(rows, cols))]
        for i in range(len(diag) - 1):
            assert s[i][i + 1] == 0 and s[i + 1][i] == 0
            if diag[i]:
                assert diag[i + 1] % diag[i] == 0
            else:
                assert diag[i + 1] == 0
        prev = 1
        for k in range(1, min(rows, cols) + 1):
            dk = minor_gcd_chain(m, k)
            expect = dk // prev if dk else 0
            assert diag[k - 1] == expect
            if dk == 0:
                break
            prev = dk


def test_mat_pow_and_unimodular_inverse():
    a = [[2, 1], [1, 1]]
    assert mat_pow_int(a, 2) == [[5, 3], [3, 2]]
    inv = inverse_unimodular(a)
    assert inv == [[1, -1], [-1, 2]]
    assert mat_mul_int(a, inv) == [[1, 0], [0, 1]]
    assert mat_pow_int(a, -2) == mat_mul_int(inv, inv)
    with pytest.raises(Singular):
        inverse_unimodular([[2, 0], [0, 2]])


# ---------------------------------------------------------------------------
# lattice intersection
# ---------------------------------------------------------------------------

def coset_count(q: ExactMatrix, span: int) -> int:
    """Independent index oracle: order of the image of x -> frac(Q x) on Z^n.

    The kernel is Z^n meet Q^-1 Z^n, so the image size is the subgroup index.
    ``span`` must be a period of the map, e.g. the lcm of the denominators.
    """
    n = q.rows
    rows = q.rational_lists()
    residues = set()
    for point in itertools.product(range(span), repeat=n):
        key = tuple(
            (sum(rows[i][j] * point[j] for j in range(n))) % 1 for i in range(n)
        )
        residues.add(key)
    return len(residues)


def lcm_denominators(m: ExactMatrix) -> int:
    out = 1
    for row in m.rational_lists():
        for x in row:
            out = out * x.denominator // math.gcd(out, x.denominator)
    return out


def test_lattice_intersect_trivial():
    c, i1, i2 = lattice_intersect(
        ExactMatrix.identity(2), ExactMatrix.diagonal([Fraction(1, 2), Fraction(1, 2)])
    )
    assert c.basis == ExactMatrix.identity(2)
    assert (i1, i2) == (1, 4)
    c, i1, i2 = lattice_intersect(
        ExactMatrix.identity(2), ExactMatrix.diagonal([Fraction(1, 2), Fraction(1)])
    )
    assert (i1, i2) == (1, 2)


def test_lattice_intersect_vs_brute_force():
    b2 = ExactMatrix([[Fraction(1, 2), Fraction(1, 3)], [0, Fraction(1, 5)]])
    c, i1, i2 = lattice_intersect(ExactMatrix.identity(2), b2)
    q = b2.inverse()  # membership of x in B2 Z^2 is integrality of Q x
    assert i1 == coset_count(q, lcm_denominators(q))
    qq = b2  # index in B2 Z^2: w -> frac(B1^-1 B2 w) = frac(B2 w)
    assert i2 == coset_count(qq, lcm_denominators(qq))


def test_lattice_intersect_randomized_properties():
    rnd = random.Random(12)
    checked = 0
    while checked < 12:
        b1 = ExactMatrix.identity(2)
        b2 = ExactMatrix(
            [
                [Fraction(rnd.randint(-3, 3), rnd.randint(1, 3)) for _ in range(2)]
                for _ in range(2)
            ]
        )
        if b2.det() == 0:
            continue
        q1 = b2.inverse() @ b1  # x in Z^2 with B1 x in B2 Z^2: frac(B2^-1 B1 x)
        q2 = b1.inverse() @ b2
        if max(lcm_denominators(q1), lcm_denominators(q2)) > 40:
            continue  # keep the brute-force box small
        checked += 1
        c, i1, i2 = lattice_intersect(b1, b2)
        # every column of C lies in both lattices (integer-solvability check)
        for j in range(2):
            col = ExactMatrix([[x] for x in c.basis.column(j)])
            assert b1.solve(col).is_integer
            assert b2.solve(col).is_integer
        # idx1 * det(B1) = +- det(C)
        assert i1 * abs(b1.det()) == abs(c.basis.det())
        assert i2 * abs(b2.det()) == abs(c.basis.det())
        # brute-force cross-check of both indices
        assert i1 == coset_count(q1, lcm_denominators(q1))
        assert i2 == coset_count(q2, lcm_denominators(q2))


def test_zrank_intersection():
    assert zrank_intersection(ExactMatrix.identity(2), ExactMatrix.identity(2)) == 2
    third = ExactMatrix.diagonal([Fraction(1, 3), Fraction(1, 3)])
    assert zrank_intersection(ExactMatrix.identity(2), third) == 2
    # any rational pair has full rank
    rnd = random.Random(6)
    for _ in range(10):
        b1 = ExactMatrix(
            [[Fraction(rnd.randint(-5, 5), rnd.randint(1, 3)) for _ in range(2)] for _ in range(2)]
        )
        b2 = ExactMatrix(
            [[Fraction(rnd.randint(-5, 5), rnd.randint(1, 3)) for _ in range(2)] for _ in range(2)]
        )
        if b1.det() == 0 or b2.det() == 0:
            continue
        assert zrank_intersection(b1, b2) == 2


def test_zrank_intersection_quadratic_drop():
    # sqrt(5) I against I: no nonzero rational combination stays rational
    s5 = ExactMatrix.diagonal([Quad(0, 1, 5), Quad(0, 1, 5)], 5)
    assert zrank_intersection(ExactMatrix.identity(2), s5) == 0
    # block case: one rational direction survives
    mixed = ExactMatrix.diagonal([Quad(0, 1, 5), Quad(2, 0, 5)], 5)
    assert zrank_intersection(ExactMatrix.identity(2), mixed) == 1


# ---------------------------------------------------------------------------
# rational reconstruction
# ---------------------------------------------------------------------------

def sqrt2_convergents(bound):
    """Continued fraction of sqrt(2) = [1; 2, 2, ...]: direct enumeration."""
    out = []
    p_prev, q_prev = 1, 0
    p, q = 1, 1
    while q <= bound:
        out.append((p, q))
        p, p_prev = 2 * p + p_prev, p
        q, q_prev = 2 * q + q_prev, q
    return out


def test_sqrt2_has_no_close_convergent_at_1000():
    convs = sqrt2_convergents(1000)
    for p, q in convs:
        assert abs(math.sqrt(2) - p / q) > 1e-9
    assert reconstruct_fraction(math.sqrt(2), 1000, 1e-9) is None


def test_sqrt2_rejected_at_large_bound():
    # convergents do get within 1e-9 here; the uniqueness clause rejects them
    convs = sqrt2_convergents(10**6)
    assert any(abs(math.sqrt(2) - p / q) <= 1e-9 for p, q in convs)
    assert reconstruct_fraction(math.sqrt(2), 10**6, 1e-9) is None


def test_reconstruct_simple():
    assert reconstruct_fraction(0.5, 10, 1e-6) == Fraction(1, 2)
    assert reconstruct_fraction(0.3333333333, 10, 1e-6) == Fraction(1, 3)
    assert reconstruct_fraction(-1.25, 10, 1e-9) == Fraction(-5, 4)
    assert reconstruct_fraction(3.0, 10, 1e-9) == 3


def test_matrix_in_GLQ_examples():
    m = matrix_in_GLQ([[0.5, 0.3333333333], [0.25, 1.0]], 10, 1e-6)
    assert m == ExactMatrix([[Fraction(1, 2), Fraction(1, 3)], [Fraction(1, 4), 1]])
    assert matrix_in_GLQ([[1.0, 0.0], [0.0, 1.0]], 10, 1e-9) == ExactMatrix.identity(2)
    assert matrix_in_GLQ([[math.sqrt(2), 0.0], [0.0, 1.0]], 1000, 1e-9) is None


def test_matrix_in_GLQ_singular():
    with pytest.raises(Singular):
        matrix_in_GLQ([[1.0, 1.0], [1.0, 1.0]], 10, 1e-9)


def test_reconstruction_recovers_rendered_rationals():
    rnd = random.Random(8)
    for _ in range(400):
        q = rnd.randint(1, 999)
        p = rnd.randint(-10 * q, 10 * q)
        x = p / q  # rendered to binary64: error well under tol/2
        got = reconstruct_fraction(x, 10**6, 1e-9)
        assert got == Fraction(p, q)


def test_matrix_recovery_invariant():
    rnd = random.Random(13)
    for _ in range(30):
        m = [
            [Fraction(rnd.randint(-20, 20), rnd.randint(1, 99)) for _ in range(2)]
            for _ in range(2)
        ]
        exact = ExactMatrix(m)
        if exact.det() == 0:
            continue
        rendered = [[float(x) for x in row] for row in m]
        got = matrix_in_GLQ(rendered, 10**6, 1e-9)
        assert got == exact


def test_int_lattice_contains():
    lat = IntLattice(ExactMatrix([[2, 0], [0, 3]]))
    assert lat.contains([2, 3])
    assert not lat.contains([1, 0])
