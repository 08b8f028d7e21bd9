"""Exact scalars: integers, rationals, and real quadratic irrationals a + b*sqrt(d).

Integers are plain ``int``, rationals are ``fractions.Fraction``; only the
quadratic layer needs its own class.  A ``Quad`` with b == 0 is a rational in
disguise and compares equal to the matching ``Fraction``.  Values from fields
with different radicands never mix silently: arithmetic on two genuinely
irrational values with different ``d`` raises ``MixedField``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

from .errors import MixedField

Scalar = Union[int, Fraction, "Quad"]

_RATIONAL = (int, Fraction)


def squarefree_decompose(n: int) -> tuple[int, int]:
    """Write n > 0 as s * f**2 with s squarefree; returns (s, f)."""
    if n <= 0:
        raise ValueError("positive integer required")
    s, f = n, 1
    p = 2
    while p * p <= s:
        while s % (p * p) == 0:
            s //= p * p
            f *= p
        p += 1 if p == 2 else 2
    return s, f


class Quad:
    """Element a + b*sqrt(d) of the real quadratic field Q(sqrt(d)), d squarefree >= 2."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=0, d: int = 2) -> None:
        a = Fraction(a)
        b = Fraction(b)
        if b != 0:
            if d < 2:
                raise ValueError("radicand must be >= 2")
            s, f = squarefree_decompose(d)
            if f != 1:
                b *= f
                d = s
        self.a = a
        self.b = b
        self.d = int(d)

    # -- construction helpers

    @classmethod
    def of(cls, value, d: int) -> "Quad":
        """Coerce an int/Fraction/Quad into Q(sqrt(d))."""
        if isinstance(value, Quad):
            if value.b != 0 and value.d != d:
                raise MixedField(f"cannot place sqrt({value.d}) value in Q(sqrt({d}))")
            return cls(value.a, value.b, d)
        return cls(Fraction(value), 0, d)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    @property
    def is_integer(self) -> bool:
        return self.b == 0 and self.a.denominator == 1

    def rational_value(self) -> Fraction:
        if self.b != 0:
            raise ValueError(f"{self} is irrational")
        return self.a

    def conjugate(self) -> "Quad":
        return Quad(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    # -- field resolution

    def _join(self, other) -> tuple["Quad", "Quad"]:
        if isinstance(other, _RATIONAL):
            return self, Quad(Fraction(other), 0, self.d)
        if isinstance(other, Quad):
            if self.b == 0 and other.b != 0:
                return Quad(self.a, 0, other.d), other
            if other.b == 0:
                return self, Quad(other.a, 0, self.d)
            if self.d != other.d:
                raise MixedField(f"sqrt({self.d}) vs sqrt({other.d})")
            return self, other
        return NotImplemented, NotImplemented

    # -- arithmetic

    def __add__(self, other):
        x, y = self._join(other)
        if x is NotImplemented:
            return NotImplemented
        return Quad(x.a + y.a, x.b + y.b, x.d)

    __radd__ = __add__

    def __neg__(self):
        return Quad(-self.a, -self.b, self.d)

    def __sub__(self, other):
        x, y = self._join(other)
        if x is NotImplemented:
            return NotImplemented
        return Quad(x.a - y.a, x.b - y.b, x.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        x, y = self._join(other)
        if x is NotImplemented:
            return NotImplemented
        return Quad(x.a * y.a + x.b * y.b * x.d, x.a * y.b + x.b * y.a, x.d)

    __rmul__ = __mul__

    def inverse(self) -> "Quad":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero quadratic scalar")
        return Quad(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        x, y = self._join(other)
        if x is NotImplemented:
            return NotImplemented
        return x * y.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = Quad(1, 0, self.d)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- exact order

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(d)."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == sb or sa == 0:
            return sb
        # opposite signs: compare a^2 with b^2 d; result carries sign of the winner
        lhs = self.a * self.a
        rhs = self.b * self.b * self.d
        if lhs == rhs:  # impossible for squarefree d >= 2 unless a = b = 0
            return 0
        return sa if lhs > rhs else sb

    def _cmp(self, other) -> int:
        x, y = self._join(other)
        if x is NotImplemented:
            raise TypeError(f"cannot compare Quad with {type(other).__name__}")
        return (x - y).sign()

    def __eq__(self, other):
        if isinstance(other, (Quad, *_RATIONAL)):
            try:
                return self._cmp(other) == 0
            except MixedField:
                return False
        return NotImplemented

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __repr__(self) -> str:
        if self.b == 0:
            return f"Quad({self.a})"
        return f"Quad({self.a}, {self.b}, d={self.d})"

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        return f"{self.a}{'+' if self.b >= 0 else '-'}{abs(self.b)}*sqrt({self.d})"


def as_fraction(x: Scalar) -> Fraction:
    """Exact rational value of x; raises if x is genuinely irrational."""
    if isinstance(x, Quad):
        return x.rational_value()
    if isinstance(x, Rational):
        return Fraction(x)
    raise TypeError(f"not an exact scalar: {type(x).__name__}")


def scalar_to_float(x: Scalar) -> float:
    return float(x)


def scalar_sign(x: Scalar) -> int:
    if isinstance(x, Quad):
        return x.sign()
    return (x > 0) - (x < 0)
