"""The ambient group R^n x|_eta R^m built from commuting traceless diagonal
matrices, its Lie algebra, and the exp/log pair.

Everything here is IEEE binary64: the diagonal data are logarithms of
eigenvalues and therefore transcendental, so the ambient group is inherently
approximate.  Exact arithmetic lives in the lattice layer, which only ever
needs the rounded integer holonomy matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import (
    BadShape,
    InvalidDiagSystem,
    NotTraceless,
    RankDeficientOmega,
    RepeatedEntryInColumn,
    SolvlatError,
    ZeroEntry,
)

DEFAULT_TOL = 1e-9

PHI1_SERIES_CUTOFF = 1e-4
PHI1_SERIES_TERMS = 8


def phi1_series(mu: float) -> float:
    """Truncated series 1 + mu/2! + mu^2/3! + ... (PHI1_SERIES_TERMS terms)."""
    acc = 0.0
    term = 1.0
    for k in range(PHI1_SERIES_TERMS):
        acc += term
        term *= mu / (k + 2)
    return acc


def phi1_closed(mu: float) -> float:
    """(e^mu - 1)/mu via expm1; only trustworthy away from mu = 0."""
    return math.expm1(mu) / mu


def phi1(mu: float) -> float:
    """(e^mu - 1)/mu, series below the cutoff, closed form above."""
    if abs(mu) < PHI1_SERIES_CUTOFF:
        return phi1_series(mu)
    return phi1_closed(mu)


def phi1_vec(mu: np.ndarray) -> np.ndarray:
    mu = np.asarray(mu, dtype=float)
    return np.array([phi1(v) for v in np.ravel(mu)]).reshape(mu.shape)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class DiagSystem:
    """Validated diagonal data: column i holds the diagonal of the i-th generator.

    ``d`` is the n x m matrix of diagonal entries; viewed as a linear map
    R^m -> R^n it is the (injective) matrix Omega.  Unimodularity of the group
    is a consequence of the zero column sums and is recorded, not re-measured.
    """

    n: int
    m: int
    d: np.ndarray
    precision: str = "double"
    unimodular: bool = field(default=True, init=False)

    @property
    def omega(self) -> np.ndarray:
        return self.d

    def eta_diag(self, t: Sequence[float]) -> np.ndarray:
        """Diagonal of eta(t) = exp(t . Delta) as a length-n vector."""
        return np.exp(self.d @ np.asarray(t, dtype=float))

    def eta(self, t: Sequence[float]) -> np.ndarray:
        return np.diag(self.eta_diag(t))

    def identity(self) -> "GroupElement":
        return GroupElement(self, np.zeros(self.n), np.zeros(self.m))

    def element(self, x: Sequence[float], t: Sequence[float]) -> "GroupElement":
        return GroupElement(self, np.asarray(x, float), np.asarray(t, float))

    def algebra_element(self, X: Sequence[float], T: Sequence[float]) -> "AlgebraElement":
        return AlgebraElement(self, np.asarray(X, float), np.asarray(T, float))


def validate_diag_system(
    d: Union[Sequence[Sequence[float]], np.ndarray],
    *,
    trace_tol: float = DEFAULT_TOL,
    precision: str = "double",
) -> DiagSystem:
    """Check the diagonal data and return the validated system.

    Raises InvalidDiagSystem carrying every violated constraint: BadShape
    (m > n or empty), NotTraceless, ZeroEntry, RepeatedEntryInColumn,
    RankDeficientOmega.
    """
    mat = np.array(d, dtype=float)
    if mat.ndim != 2 or mat.size == 0:
        raise InvalidDiagSystem([BadShape(f"need a 2-d matrix, got shape {mat.shape}")])
    n, m = mat.shape
    violations: list[SolvlatError] = []
    if m > n or n < 1 or m < 1:
        violations.append(BadShape(f"m = {m} exceeds n = {n}", n=n, m=m))
    if not np.all(np.isfinite(mat)):
        violations.append(BadShape("non-finite entries"))
        raise InvalidDiagSystem(violations)
    for i in range(m):
        col = mat[:, i]
        if abs(col.sum()) > trace_tol:
            violations.append(NotTraceless(f"column {i} sums to {col.sum():.3e}", column=i))
        if np.any(col == 0.0):
            violations.append(ZeroEntry(f"column {i} has a zero entry", column=i))
        for j in range(n):
            for k in range(j + 1, n):
                if col[j] == col[k]:
                    violations.append(
                        RepeatedEntryInColumn(
                            f"column {i} repeats entry {col[j]!r}", column=i, positions=(j, k)
                        )
                    )
    if m <= n and np.linalg.matrix_rank(mat) < m:
        violations.append(RankDeficientOmega(f"rank {np.linalg.matrix_rank(mat)} < {m}"))
    if violations:
        raise InvalidDiagSystem(violations)
    return DiagSystem(n=n, m=m, d=_frozen(mat), precision=precision)


@dataclass(frozen=True, eq=False)
class GroupElement:
    sys: DiagSystem
    x: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen(self.x))
        object.__setattr__(self, "t", _frozen(self.t))
        if self.x.shape != (self.sys.n,) or self.t.shape != (self.sys.m,):
            raise ValueError("component shapes do not match the system")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.t))):
            raise ValueError("non-finite coordinates")

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        if other.sys is not self.sys and not np.array_equal(other.sys.d, self.sys.d):
            raise ValueError("elements of different systems")
        scale = self.sys.eta_diag(self.t)
        return GroupElement(self.sys, self.x + scale * other.x, self.t + other.t)

    def inverse(self) -> "GroupElement":
        scale = self.sys.eta_diag(-self.t)
        return GroupElement(self.sys, -(scale * self.x), -self.t)

    def allclose(self, other: "GroupElement", tol: float = DEFAULT_TOL) -> bool:
        return bool(
            np.all(np.abs(self.x - other.x) <= tol)
            and np.all(np.abs(self.t - other.t) <= tol)
        )

    def norm_inf(self) -> float:
        return max(float(np.max(np.abs(self.x))), float(np.max(np.abs(self.t))))

    def __repr__(self) -> str:
        return f"GroupElement(x={self.x.tolist()}, t={self.t.tolist()})"


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    sys: DiagSystem
    X: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "X", _frozen(self.X))
        object.__setattr__(self, "T", _frozen(self.T))
        if self.X.shape != (self.sys.n,) or self.T.shape != (self.sys.m,):
            raise ValueError("component shapes do not match the system")

    def __repr__(self) -> str:
        return f"AlgebraElement(X={self.X.tolist()}, T={self.T.tolist()})"


def group_mul(g: GroupElement, h: GroupElement) -> GroupElement:
    return g * h


def group_inv(g: GroupElement) -> GroupElement:
    return g.inverse()


def bracket(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """[(X,t),(Y,s)] = ((t.Delta) Y - (s.Delta) X, 0)."""
    sys = a.sys
    ta = sys.d @ a.T
    tb = sys.d @ b.T
    return AlgebraElement(sys, ta * b.X - tb * a.X, np.zeros(sys.m))


def exp_g(a: AlgebraElement) -> GroupElement:
    """exp(X, T) = (phi1(T.Delta) X, T), phi1 applied on the diagonal."""
    mu = a.sys.d @ a.T
    return GroupElement(a.sys, phi1_vec(mu) * a.X, a.T)


def log_g(g: GroupElement) -> AlgebraElement:
    mu = g.sys.d @ g.t
    return AlgebraElement(g.sys, g.x / phi1_vec(mu), g.t)


def embed_gl(g: GroupElement) -> np.ndarray:
    """Upper-triangular (n+1)x(n+1) matrix realization of g."""
    n = g.sys.n
    out = np.zeros((n + 1, n + 1))
    out[np.arange(n), np.arange(n)] = g.sys.eta_diag(g.t)
    out[:n, n] = g.x
    out[n, n] = 1.0
    return out
