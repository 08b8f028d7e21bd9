"""Dense exact matrices over Q or a fixed real quadratic field Q(sqrt(d)).

A matrix is rational (``field_d is None``, entries are ``Fraction``) or lives in
one quadratic field (``field_d == d``, entries are ``Quad`` sharing that d).
Shapes are tiny throughout the package (n <= 10), so plain Gauss-Jordan over
the exact field is the right tool; no pivoting heuristics are needed beyond
"first nonzero".
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import MixedField, NonRealSpectrum, RepeatedEigenvalue, Singular
from .scalars import Quad, Scalar, squarefree_decompose

Entry = Union[int, Fraction, Quad]


def _normalize_entry(x, d: Optional[int]):
    if isinstance(x, Quad):
        if x.b == 0:
            return Fraction(x.a) if d is None else Quad(x.a, 0, d)
        if d is None or x.d != d:
            raise MixedField(f"entry from Q(sqrt({x.d})) in a field-{d} matrix")
        return x
    f = Fraction(x)
    return f if d is None else Quad(f, 0, d)


def _infer_field(entries: Iterable) -> Optional[int]:
    d = None
    for x in entries:
        if isinstance(x, Quad) and x.b != 0:
            if d is None:
                d = x.d
            elif d != x.d:
                raise MixedField(f"sqrt({d}) vs sqrt({x.d}) in one matrix")
    return d


class ExactMatrix:
    __slots__ = ("rows", "cols", "field_d", "_e")

    def __init__(self, rows_data: Sequence[Sequence], d: Optional[int] = None) -> None:
        data = [list(r) for r in rows_data]
        if not data or not data[0]:
            raise ValueError("empty matrix")
        cols = len(data[0])
        if any(len(r) != cols for r in data):
            raise ValueError("ragged rows")
        if d is None:
            d = _infer_field(x for r in data for x in r)
        self.rows = len(data)
        self.cols = cols
        self.field_d = d
        self._e = tuple(tuple(_normalize_entry(x, d) for x in r) for r in data)

    # -- constructors

    @classmethod
    def identity(cls, n: int, d: Optional[int] = None) -> "ExactMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], d)

    @classmethod
    def zeros(cls, r: int, c: int, d: Optional[int] = None) -> "ExactMatrix":
        return cls([[0] * c for _ in range(r)], d)

    @classmethod
    def diagonal(cls, entries: Sequence, d: Optional[int] = None) -> "ExactMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], d)

    @classmethod
    def from_int_matrix(cls, m: Sequence[Sequence[int]]) -> "ExactMatrix":
        return cls([[int(x) for x in r] for r in m], None)

    # -- access

    def __getitem__(self, ij: tuple[int, int]):
        return self._e[ij[0]][ij[1]]

    def row(self, i: int) -> tuple:
        return self._e[i]

    def column(self, j: int) -> tuple:
        return tuple(self._e[i][j] for i in range(self.rows))

    def to_lists(self) -> list[list]:
        return [list(r) for r in self._e]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def is_rational(self) -> bool:
        return all(not isinstance(x, Quad) or x.b == 0 for r in self._e for x in r)

    @property
    def is_integer(self) -> bool:
        for r in self._e:
            for x in r:
                if isinstance(x, Quad):
                    if not x.is_integer:
                        return False
                elif x.denominator != 1:
                    return False
        return True

    def rational_lists(self) -> list[list[Fraction]]:
        if not self.is_rational:
            raise ValueError("matrix has irrational entries")
        out = []
        for r in self._e:
            out.append([x.rational_value() if isinstance(x, Quad) else x for x in r])
        return out

    def int_lists(self) -> list[list[int]]:
        if not self.is_integer:
            raise ValueError("matrix has non-integer entries")
        out = []
        for r in self._e:
            row = []
            for x in r:
                f = x.rational_value() if isinstance(x, Quad) else x
                row.append(int(f))
            out.append(row)
        return out

    def to_float(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self._e], dtype=float)

    def rational_part(self) -> "ExactMatrix":
        """Entrywise a of a + b*sqrt(d), as a rational matrix."""
        return ExactMatrix(
            [[x.a if isinstance(x, Quad) else Fraction(x) for x in r] for r in self._e], None
        )

    def irrational_part(self) -> "ExactMatrix":
        """Entrywise b of a + b*sqrt(d), as a rational matrix (zero if rational)."""
        return ExactMatrix(
            [[x.b if isinstance(x, Quad) else Fraction(0) for x in r] for r in self._e], None
        )

    # -- algebra

    def _coerced_pair(self, other: "ExactMatrix") -> tuple["ExactMatrix", "ExactMatrix"]:
        if self.field_d == other.field_d:
            return self, other
        if self.field_d is None:
            return ExactMatrix(self.to_lists(), other.field_d), other
        if other.field_d is None:
            return self, ExactMatrix(other.to_lists(), self.field_d)
        raise MixedField(f"sqrt({self.field_d}) vs sqrt({other.field_d})")

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        a, b = self._coerced_pair(other)
        if (a.rows, a.cols) != (b.rows, b.cols):
            raise ValueError("shape mismatch")
        return ExactMatrix(
            [[a._e[i][j] + b._e[i][j] for j in range(a.cols)] for i in range(a.rows)], a.field_d
        )

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + (-other)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix([[-x for x in r] for r in self._e], self.field_d)

    def scale(self, c) -> "ExactMatrix":
        d = self.field_d
        if isinstance(c, Quad) and c.b != 0:
            if d is None:
                d = c.d
            elif d != c.d:
                raise MixedField("scalar field differs from matrix field")
        return ExactMatrix([[x * c for x in r] for r in self._e], d)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        a, b = self._coerced_pair(other)
        if a.cols != b.rows:
            raise ValueError("shape mismatch")
        bt = list(zip(*b._e))
        out = [
            [sum(x * y for x, y in zip(ra, cb)) for cb in bt]
            for ra in a._e
        ]
        return ExactMatrix(out, a.field_d)

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(list(zip(*self._e)), self.field_d)

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        return all(
            self._e[i][j] == other._e[i][j]
            for i in range(self.rows)
            for j in range(self.cols)
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self._e))

    def _zero(self):
        return Fraction(0) if self.field_d is None else Quad(0, 0, self.field_d)

    def _one(self):
        return Fraction(1) if self.field_d is None else Quad(1, 0, self.field_d)

    def det(self):
        """Exact determinant by fraction-free-ish Gaussian elimination over the field."""
        if not self.is_square:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        a = [list(r) for r in self._e]
        det = self._one()
        for col in range(n):
            piv = next((i for i in range(col, n) if a[i][col] != 0), None)
            if piv is None:
                return self._zero()
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
                det = -det
            p = a[col][col]
            det = det * p
            for i in range(col + 1, n):
                if a[i][col] != 0:
                    f = a[i][col] / p
                    a[i] = [a[i][j] - f * a[col][j] for j in range(n)]
        return det

    def solve(self, rhs: "ExactMatrix") -> "ExactMatrix":
        """Solve self @ X = rhs exactly; raises Singular when the system is."""
        a, b = self._coerced_pair(rhs)
        if not a.is_square or a.rows != b.rows:
            raise ValueError("shape mismatch")
        n, k = a.rows, b.cols
        m = [list(a._e[i]) + list(b._e[i]) for i in range(n)]
        for col in range(n):
            piv = next((i for i in range(col, n) if m[i][col] != 0), None)
            if piv is None:
                raise Singular("singular exact matrix")
            m[col], m[piv] = m[piv], m[col]
            p = m[col][col]
            m[col] = [x / p for x in m[col]]
            for i in range(n):
                if i != col and m[i][col] != 0:
                    f = m[i][col]
                    m[i] = [m[i][j] - f * m[col][j] for j in range(n + k)]
        return ExactMatrix([r[n:] for r in m], a.field_d)

    def inverse(self) -> "ExactMatrix":
        return self.solve(ExactMatrix.identity(self.rows, self.field_d))

    def rank(self) -> int:
        a = [list(r) for r in self._e]
        rows, cols = self.rows, self.cols
        r = 0
        for col in range(cols):
            piv = next((i for i in range(r, rows) if a[i][col] != 0), None)
            if piv is None:
                continue
            a[r], a[piv] = a[piv], a[r]
            p = a[r][col]
            for i in range(r + 1, rows):
                if a[i][col] != 0:
                    f = a[i][col] / p
                    a[i] = [a[i][j] - f * a[r][j] for j in range(cols)]
            r += 1
            if r == rows:
                break
        return r

    def nullspace(self) -> Optional["ExactMatrix"]:
        """Basis of the right kernel as columns, or None when it is trivial."""
        a = [list(r) for r in self._e]
        rows, cols = self.rows, self.cols
        pivots: list[int] = []
        r = 0
        for col in range(cols):
            piv = next((i for i in range(r, rows) if a[i][col] != 0), None)
            if piv is None:
                continue
            a[r], a[piv] = a[piv], a[r]
            p = a[r][col]
            a[r] = [x / p for x in a[r]]
            for i in range(rows):
                if i != r and a[i][col] != 0:
                    f = a[i][col]
                    a[i] = [a[i][j] - f * a[r][j] for j in range(cols)]
            pivots.append(col)
            r += 1
            if r == rows:
                break
        free = [j for j in range(cols) if j not in pivots]
        if not free:
            return None
        basis_cols = []
        for j in free:
            vec = [self._zero()] * cols
            vec[j] = self._one()
            for rr, pc in enumerate(pivots):
                vec[pc] = -a[rr][j]
            basis_cols.append(vec)
        return ExactMatrix([list(row) for row in zip(*basis_cols)], self.field_d)

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in r) for r in self._e)
        tag = "Q" if self.field_d is None else f"Q(sqrt({self.field_d}))"
        return f"ExactMatrix[{tag}]({body})"


def quad_solve_char2(m: Sequence[Sequence[int]]) -> tuple[Scalar, Scalar]:
    """Exact eigenvalues of a 2x2 integer matrix, largest first.

    Non-square discriminants land in Q(sqrt(d)) for the squarefree core d;
    perfect squares give plain rationals.  Zero discriminant raises
    RepeatedEigenvalue, negative raises NonRealSpectrum.
    """
    (a, b), (c, e) = ((int(x) for x in row) for row in m)
    tr = a + e
    det = a * e - b * c
    disc = tr * tr - 4 * det
    if disc == 0:
        raise RepeatedEigenvalue(f"discriminant 0 for trace {tr}, det {det}")
    if disc < 0:
        raise NonRealSpectrum(f"discriminant {disc} < 0")
    core, f = squarefree_decompose(disc)
    if core == 1:
        lam1 = Fraction(tr + f, 2)
        lam2 = Fraction(tr - f, 2)
        return lam1, lam2
    half_tr = Fraction(tr, 2)
    half_f = Fraction(f, 2)
    return Quad(half_tr, half_f, core), Quad(half_tr, -half_f, core)
