"""Exact integer-matrix machinery: normal forms, lattice intersection,
and rational reconstruction from floating-point data.

All integer matrices here are plain lists of lists of Python ints, so every
transform witness (the unimodular U, V) is exact by construction.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import RankDeficient, Singular
from .exactmat import ExactMatrix

IntMatrix = list[list[int]]


def _int_matrix(m: Sequence[Sequence]) -> IntMatrix:
    out = []
    for r in m:
        row = []
        for x in r:
            if isinstance(x, float):
                if x != int(x):
                    raise ValueError(f"non-integer entry {x!r}")
                x = int(x)
            elif isinstance(x, Fraction):
                if x.denominator != 1:
                    raise ValueError(f"non-integer entry {x!r}")
                x = x.numerator
            row.append(int(x))
        out.append(row)
    if not out or any(len(r) != len(out[0]) for r in out):
        raise ValueError("empty or ragged matrix")
    return out


def identity_int(n: int) -> IntMatrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul_int(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> IntMatrix:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(ra, cb)) for cb in bt] for ra in a]


def mat_eq_int(a, b) -> bool:
    return [list(r) for r in a] == [list(r) for r in b]


def det_int(m: Sequence[Sequence[int]]) -> int:
    """Exact determinant via Bareiss fraction-free elimination."""
    a = [list(r) for r in m]
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError("square matrix required")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if piv is None:
                return 0
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def mat_pow_int(m: Sequence[Sequence[int]], k: int) -> IntMatrix:
    """m**k for integer k; negative powers require |det m| = 1."""
    n = len(m)
    if k == 0:
        return identity_int(n)
    base = _int_matrix(m)
    if k < 0:
        base = inverse_unimodular(base)
        k = -k
    out = identity_int(n)
    while k:
        if k & 1:
            out = mat_mul_int(out, base)
        base = mat_mul_int(base, base)
        k >>= 1
    return out


def inverse_unimodular(m: Sequence[Sequence[int]]) -> IntMatrix:
    """Exact integer inverse of a matrix with det +-1."""
    d = det_int(m)
    if d not in (1, -1):
        raise Singular(f"determinant {d}, not a unit")
    inv = ExactMatrix.from_int_matrix(m).inverse()
    return inv.int_lists()


# ---------------------------------------------------------------------------
# Hermite and Smith normal forms
# ---------------------------------------------------------------------------

def hnf(m: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix]:
    """Row Hermite normal form with its unimodular witness.

    Returns (H, U) with H = U @ m, U unimodular, H in upper-echelon form with
    positive pivots and the entries above each pivot reduced into [0, pivot).
    """
    h = _int_matrix(m)
    rows, cols = len(h), len(h[0])
    u = identity_int(rows)
    r = 0
    for col in range(cols):
        piv = next((i for i in range(r, rows) if h[i][col] != 0), None)
        if piv is None:
            continue
        if piv != r:
            h[r], h[piv] = h[piv], h[r]
            u[r], u[piv] = u[piv], u[r]
        for i in range(r + 1, rows):
            while h[i][col] != 0:
                a, b = h[r][col], h[i][col]
                g = math.gcd(a, b)
                x, y = _bezout(a, b, g)
                aa, bb = a // g, b // g
                h[r], h[i] = (
                    [x * p + y * q for p, q in zip(h[r], h[i])],
                    [-bb * p + aa * q for p, q in zip(h[r], h[i])],
                )
                u[r], u[i] = (
                    [x * p + y * q for p, q in zip(u[r], u[i])],
                    [-bb * p + aa * q for p, q in zip(u[r], u[i])],
                )
        if h[r][col] < 0:
            h[r] = [-x for x in h[r]]
            u[r] = [-x for x in u[r]]
        p = h[r][col]
        for i in range(r):
            q = h[i][col] // p
            if q:
                h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        r += 1
        if r == rows:
            break
    return h, u


def _bezout(a: int, b: int, g: int) -> tuple[int, int]:
    # x*a + y*b = g with the 2x2 transform [[x, y], [-b/g, a/g]] unimodular.
    # When a | b return (sign a, 0) so the transform is a pure shear; anything
    # else can reintroduce cleared entries and stall the normal-form loops.
    if a != 0 and b % a == 0:
        return (1 if a > 0 else -1), 0
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r == g:
        return old_s, old_t
    return -old_s, -old_t  # gcd came out negative (a, b < 0 cases)


def snf(m: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form: S = U @ m @ V, S diagonal with s1 | s2 | ...

    U and V are unimodular witnesses of the row and column operations.
    """
    s = _int_matrix(m)
    rows, cols = len(s), len(s[0])
    u = identity_int(rows)
    v = identity_int(cols)

    def row_step(t: int) -> bool:
        changed = False
        for i in range(t + 1, rows):
            while s[i][t] != 0:
                changed = True
                a, b = s[t][t], s[i][t]
                g = math.gcd(a, b)
                x, y = _bezout(a, b, g)
                aa, bb = a // g, b // g
                s[t], s[i] = (
                    [x * p + y * q for p, q in zip(s[t], s[i])],
                    [-bb * p + aa * q for p, q in zip(s[t], s[i])],
                )
                u[t], u[i] = (
                    [x * p + y * q for p, q in zip(u[t], u[i])],
                    [-bb * p + aa * q for p, q in zip(u[t], u[i])],
                )
        return changed

    def col_step(t: int) -> bool:
        changed = False
        for j in range(t + 1, cols):
            while s[t][j] != 0:
                changed = True
                a, b = s[t][t], s[t][j]
                g = math.gcd(a, b)
                x, y = _bezout(a, b, g)
                aa, bb = a // g, b // g
                for r_ in s:
                    r_[t], r_[j] = x * r_[t] + y * r_[j], -bb * r_[t] + aa * r_[j]
                for r_ in v:
                    r_[t], r_[j] = x * r_[t] + y * r_[j], -bb * r_[t] + aa * r_[j]
        return changed

    for t in range(min(rows, cols)):
        piv = next(
            ((i, j) for j in range(t, cols) for i in range(t, rows) if s[i][j] != 0),
            None,
        )
        if piv is None:
            break
        pi, pj = piv
        if pi != t:
            s[t], s[pi] = s[pi], s[t]
            u[t], u[pi] = u[pi], u[t]
        if pj != t:
            for r_ in s:
                r_[t], r_[pj] = r_[pj], r_[t]
            for r_ in v:
                r_[t], r_[pj] = r_[pj], r_[t]
        while True:
            rc = row_step(t)
            cc = col_step(t)
            if not rc and not cc:
                break
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]

    # enforce the divisibility chain
    k = min(rows, cols)
    while True:
        fixed = True
        for i in range(k - 1):
            if s[i][i] != 0 and s[i + 1][i + 1] % s[i][i] != 0:
                fixed = False
                # fold the offending entry back and re-reduce the 2x2 block
                s[i] = [x + y for x, y in zip(s[i], s[i + 1])]
                u[i] = [x + y for x, y in zip(u[i], u[i + 1])]
                while True:
                    rc = row_step(i)
                    cc = col_step(i)
                    if not rc and not cc:
                        break
                if s[i][i] < 0:
                    s[i] = [-x for x in s[i]]
                    u[i] = [-x for x in u[i]]
                if s[i + 1][i + 1] < 0:
                    s[i + 1] = [-x for x in s[i + 1]]
                    u[i + 1] = [-x for x in u[i + 1]]
        if fixed:
            break
    return s, u, v


# ---------------------------------------------------------------------------
# Rational lattices and their intersections
# ---------------------------------------------------------------------------

class IntLattice:
    """Full-column-rank rational basis of a subgroup of Q^n.

    The lattice is basis @ Z^r; columns are the generators.
    """

    __slots__ = ("dimension", "rank", "basis")

    def __init__(self, basis: ExactMatrix) -> None:
        if not basis.is_rational:
            raise ValueError("IntLattice needs a rational basis")
        if basis.rank() != basis.cols:
            raise RankDeficient("basis columns are dependent", rank=basis.rank())
        self.basis = ExactMatrix(basis.rational_lists())
        self.dimension = basis.rows
        self.rank = basis.cols

    @classmethod
    def standard(cls, n: int) -> "IntLattice":
        return cls(ExactMatrix.identity(n))

    def contains(self, vec: Sequence[Fraction]) -> bool:
        if self.rank != self.dimension:
            raise ValueError("membership needs a square basis")
        col = ExactMatrix([[Fraction(x)] for x in vec])
        sol = self.basis.solve(col)
        return all(sol[i, 0].denominator == 1 for i in range(self.rank))

    def __repr__(self) -> str:
        return f"IntLattice({self.basis!r})"


def _as_basis(b: Union[IntLattice, ExactMatrix, Sequence[Sequence]]) -> ExactMatrix:
    if isinstance(b, IntLattice):
        return b.basis
    if isinstance(b, ExactMatrix):
        return b
    return ExactMatrix(b)


def lattice_intersect(
    b1: Union[IntLattice, ExactMatrix, Sequence[Sequence]],
    b2: Union[IntLattice, ExactMatrix, Sequence[Sequence]],
) -> tuple[IntLattice, int, int]:
    """Intersection of two full-rank rational lattices plus both subgroup indices.

    Clears denominators, solves B1 u = B2 w over Z through the HNF kernel of
    the stacked matrix [A1 | -A2], and canonicalizes the resulting basis.
    Returns (C, [B1 Z^n : C], [B2 Z^n : C]).
    """
    m1 = _as_basis(b1)
    m2 = _as_basis(b2)
    n = m1.rows
    if m1.cols != n or m2.rows != n or m2.cols != n:
        raise ValueError("square bases of one dimension required")
    den = 1
    for mat in (m1, m2):
        for row in mat.rational_lists():
            for x in row:
                den = den * x.denominator // math.gcd(den, x.denominator)
    a1 = [[int(x * den) for x in row] for row in m1.rational_lists()]
    a2 = [[int(x * den) for x in row] for row in m2.rational_lists()]
    if det_int(a1) == 0 or det_int(a2) == 0:
        raise Singular("bases must be nonsingular")

    stacked = [r1 + [-x for x in r2] for r1, r2 in zip(a1, a2)]  # n x 2n
    trans = [list(r) for r in zip(*stacked)]  # 2n x n
    h, u = hnf(trans)
    kernel = [u[i] for i in range(len(h)) if all(x == 0 for x in h[i])]
    if len(kernel) < n:
        raise RankDeficient("intersection is not full rank", rank=len(kernel))

    # image of the kernel under (u, w) -> A1 u, columns of the intersection basis
    cols = []
    for vec in kernel:
        uu = vec[:n]
        cols.append([sum(a1[i][j] * uu[j] for j in range(n)) for i in range(n)])
    c_rows = [list(r) for r in zip(*cols)]  # column vectors -> matrix
    # canonical column form: row-HNF of the transpose, transposed back
    ht, _ = hnf([list(r) for r in zip(*c_rows)])
    c_int = [list(r) for r in zip(*ht)]
    c = ExactMatrix([[Fraction(x, den) for x in row] for row in c_int])

    idx1 = abs(c.det() / m1.det())
    idx2 = abs(c.det() / m2.det())
    if idx1.denominator != 1 or idx2.denominator != 1:
        raise RankDeficient("intersection index is not integral", rank=n)
    return IntLattice(c), int(idx1), int(idx2)


def zrank_intersection(
    b1: Union[IntLattice, ExactMatrix, Sequence[Sequence]],
    b2: Union[IntLattice, ExactMatrix, Sequence[Sequence]],
) -> int:
    """Z-rank of B1 Z^n intersected with B2 Z^n for exact full-rank bases.

    For rational bases this is always n.  Over a quadratic field, write
    A = B2^-1 B1 = A0 + A1*sqrt(d); a column combination stays rational exactly
    on the kernel of A1, so the rank drops by rank(A1).
    """
    m1 = b1.basis if isinstance(b1, IntLattice) else _as_basis_any(b1)
    m2 = b2.basis if isinstance(b2, IntLattice) else _as_basis_any(b2)
    n = m1.rows
    a = m2.solve(m1)
    irr = a.irrational_part()
    return n - irr.rank()


def _as_basis_any(b) -> ExactMatrix:
    return b if isinstance(b, ExactMatrix) else ExactMatrix(b)


# ---------------------------------------------------------------------------
# Continued-fraction rational reconstruction
# ---------------------------------------------------------------------------

def reconstruct_fraction(x: float, denom_bound: int, tol: float) -> Optional[Fraction]:
    """Best continued-fraction candidate p/q for x with q <= denom_bound.

    A convergent is accepted only if |x - p/q| <= tol *and* it is the unique
    fraction with denominator <= denom_bound inside that radius
    (|x - p/q| <= 1/(2*denom_bound*q)).  The uniqueness clause is what keeps
    well-approximable irrationals like sqrt(2) from masquerading as rationals
    once denom_bound is large.
    """
    if denom_bound < 1 or tol <= 0:
        raise ValueError("denom_bound >= 1 and tol > 0 required")
    if not math.isfinite(x):
        return None
    target = Fraction(x)
    p_prev, q_prev = 1, 0
    p, q = math.floor(target), 1
    rem = target - math.floor(target)
    while True:
        if q > denom_bound:
            return None
        err = abs(target - Fraction(p, q))
        if err <= tol and 2 * denom_bound * q * err <= 1:
            return Fraction(p, q)
        if rem == 0:
            return None
        rem = 1 / rem
        a = math.floor(rem)
        rem -= a
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q


def matrix_in_GLQ(
    m: Sequence[Sequence[float]], denom_bound: int = 10**6, tol: float = 1e-9
) -> Optional[ExactMatrix]:
    """Reconstruct a square float matrix as a nonsingular rational matrix.

    Every entry must reconstruct under ``reconstruct_fraction``; otherwise the
    result is None ("no witness within bounds", not a disproof).  A successful
    reconstruction with determinant 0 raises Singular.  The returned matrix is
    a tolerance-level candidate; exact certification exists only for exact
    inputs upstream.
    """
    rows = [list(r) for r in m]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("square matrix required")
    out = []
    for r in rows:
        row = []
        for x in r:
            f = reconstruct_fraction(float(x), denom_bound, tol)
            if f is None:
                return None
            row.append(f)
        out.append(row)
    cand = ExactMatrix(out)
    if cand.det() == 0:
        raise Singular("reconstructed matrix is singular")
    return cand
