"""G-compatible pairs and the lattices sigma^-1 Z^n x| rho Z^m.

The float data (sigma, rho, the diagonal system) certify the pair once, to a
tolerance; afterwards every lattice computation runs on the rounded integer
holonomy matrices, so the discrete group theory is exact even though the
ambient embedding is binary64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DetNotOne,
    NonCommuting,
    NotInteger,
    NotNearInteger,
    Overflow,
    RepeatedEigenvalue,
    NonPositiveSpectrum,
    Singular,
)
from .exactmat import ExactMatrix
from .group import DiagSystem, GroupElement, validate_diag_system
from .intlinalg import (
    IntMatrix,
    det_int,
    identity_int,
    inverse_unimodular,
    mat_mul_int,
    mat_pow_int,
)

VERIFY_TOL = 1e-6
EMBED_TOL = 1e-9

# guard digit for floor so that re-reducing a reduced element is exactly idempotent
FLOOR_GUARD = 1e-12

# beyond this the diagonal exponentials leave binary64 range anyway
EXP_RANGE = 700.0


@dataclass(frozen=True, eq=False)
class CompatiblePair:
    """(sigma, rho) with integer holonomy A_j = sigma exp(rho^(j).Delta) sigma^-1.

    ``residual`` is the largest certification error over the m holonomy
    matrices; the exact route stores 0.0 and keeps the exact sigma/rho and the
    exact diagonal eta factors alongside the floats.
    """

    sys: DiagSystem
    sigma: np.ndarray
    rho: np.ndarray
    holonomy: tuple[tuple[tuple[int, ...], ...], ...]
    residual: float
    sigma_exact: Optional[ExactMatrix] = None
    rho_exact: Optional[ExactMatrix] = None
    eta_exact: Optional[tuple[ExactMatrix, ...]] = None

    def __post_init__(self):
        for name in ("sigma", "rho"):
            a = np.array(getattr(self, name), dtype=float)
            a.flags.writeable = False
            object.__setattr__(self, name, a)
        object.__setattr__(self, "_sigma_inv", np.linalg.inv(self.sigma))
        object.__setattr__(self, "_rho_inv", np.linalg.inv(self.rho))

    @property
    def n(self) -> int:
        return self.sys.n

    @property
    def m(self) -> int:
        return self.sys.m

    @property
    def is_exact(self) -> bool:
        return self.sigma_exact is not None

    def holonomy_list(self) -> list[IntMatrix]:
        return [[list(r) for r in a] for a in self.holonomy]


def _as_int_tuple(m: IntMatrix) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in r) for r in m)


def _check_family(mats: Sequence[IntMatrix]) -> None:
    for j, a in enumerate(mats):
        d = det_int(a)
        if d != 1:
            raise DetNotOne(f"holonomy {j} has determinant {d}", j=j, det=d)
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if mat_mul_int(mats[i], mats[j]) != mat_mul_int(mats[j], mats[i]):
                raise NonCommuting(f"holonomy matrices {i} and {j} do not commute", i=i, j=j)


def verify_pair(
    sys: DiagSystem,
    sigma: Sequence[Sequence[float]],
    rho: Sequence[Sequence[float]],
    tol: float = VERIFY_TOL,
) -> CompatiblePair:
    """Certify (sigma, rho) to tolerance and re-anchor on the rounded holonomy.

    For each column rho^(j), M_j = sigma exp(rho^(j).Delta) sigma^-1 must be
    within ``tol`` of an integer matrix with exact determinant one, and the
    rounded matrices must commute exactly.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    sigma = np.array(sigma, dtype=float)
    rho = np.array(rho, dtype=float)
    if sigma.shape != (sys.n, sys.n) or rho.shape != (sys.m, sys.m):
        raise ValueError("sigma/rho shapes do not match the system")
    if abs(np.linalg.det(sigma)) < 1e-300 or abs(np.linalg.det(rho)) < 1e-300:
        raise Singular("sigma and rho must be nonsingular")
    sigma_inv = np.linalg.inv(sigma)
    mats: list[IntMatrix] = []
    residual = 0.0
    for j in range(sys.m):
        scale = np.exp(sys.d @ rho[:, j])
        mj = (sigma * scale[None, :]) @ sigma_inv  # sigma @ diag(scale) @ sigma^-1
        aj = np.rint(mj)
        err = float(np.max(np.abs(mj - aj)))
        if err > tol:
            raise NotNearInteger(
                f"holonomy {j} is {err:.3e} away from integers", j=j, residual=err
            )
        residual = max(residual, err)
        mats.append([[int(x) for x in row] for row in aj])
    _check_family(mats)
    return CompatiblePair(
        sys=sys,
        sigma=sigma,
        rho=rho,
        holonomy=tuple(_as_int_tuple(a) for a in mats),
        residual=residual,
    )


def verify_pair_exact(
    sigma: ExactMatrix,
    etas: Sequence[ExactMatrix],
    sys: Optional[DiagSystem] = None,
    rho: Optional[Sequence[Sequence[float]]] = None,
    rho_exact: Optional[ExactMatrix] = None,
) -> CompatiblePair:
    """Exact certification: A_j = sigma E_j sigma^-1 must be integral, det 1.

    E_j are the exact diagonal factors exp(rho^(j).Delta) over one common field
    with sigma.  When ``sys`` is omitted it is derived from the entry
    logarithms with rho = identity.  Residual of the returned pair is 0.
    """
    m = len(etas)
    n = sigma.rows
    for j, e in enumerate(etas):
        if e.rows != n or e.cols != n:
            raise ValueError(f"eta factor {j} has wrong shape")
        diag = [e[i, i] for i in range(n)]
        for r in range(n):
            for c in range(n):
                if r != c and e[r, c] != 0:
                    raise ValueError(f"eta factor {j} is not diagonal")
        for i, x in enumerate(diag):
            if not (x > 0):
                raise NonPositiveSpectrum(f"eta factor {j} entry {i} not positive", j=j, i=i)
        if len(set(diag)) != n:
            raise RepeatedEigenvalue(f"eta factor {j} has repeated entries", j=j)
        prod = diag[0]
        for x in diag[1:]:
            prod = prod * x
        if prod != 1:
            raise DetNotOne(f"eta factor {j} has determinant {prod}", j=j)

    sigma_inv = sigma.inverse()
    mats: list[IntMatrix] = []
    for j, e in enumerate(etas):
        aj = (sigma @ e) @ sigma_inv
        if not aj.is_integer:
            pos = next(
                (r, c)
                for r in range(n)
                for c in range(n)
                if not _entry_is_integer(aj[r, c])
            )
            raise NotInteger(
                f"holonomy {j} entry {pos} is {aj[pos[0], pos[1]]}", j=j, position=pos
            )
        mats.append(aj.int_lists())
    _check_family(mats)

    if rho is None:
        rho = np.eye(m)
    rho = np.array(rho, dtype=float)
    if sys is None:
        if not np.array_equal(rho, np.eye(m)):
            raise ValueError("a system is required when rho is not the identity")
        d = np.array([[math.log(float(e[i, i])) for e in etas] for i in range(n)])
        sys = validate_diag_system(d, precision="exact-provided")
    else:
        # the exact eta factors must realize exp(rho^(j) . Delta) for this system
        for j, e in enumerate(etas):
            expected = np.exp(sys.d @ rho[:, j])
            got = np.array([float(e[i, i]) for i in range(n)])
            if np.max(np.abs(expected - got)) > 1e-9 * max(1.0, float(np.max(got))):
                raise ValueError(f"eta factor {j} is inconsistent with the system and rho")
    return CompatiblePair(
        sys=sys,
        sigma=sigma.to_float(),
        rho=np.array(rho, dtype=float),
        holonomy=tuple(_as_int_tuple(a) for a in mats),
        residual=0.0,
        sigma_exact=sigma,
        rho_exact=rho_exact if rho_exact is not None else ExactMatrix.identity(m),
        eta_exact=tuple(etas),
    )


def _entry_is_integer(x) -> bool:
    from .scalars import Quad

    if isinstance(x, Quad):
        return x.is_integer
    return x.denominator == 1


@dataclass(frozen=True)
class LatticeElement:
    """Integer coordinates (v, k) of the group element (sigma^-1 v, rho k)."""

    v: tuple[int, ...]
    k: tuple[int, ...]

    @classmethod
    def of(cls, v: Sequence[int], k: Sequence[int]) -> "LatticeElement":
        return cls(tuple(int(x) for x in v), tuple(int(x) for x in k))

    @classmethod
    def identity(cls, n: int, m: int) -> "LatticeElement":
        return cls((0,) * n, (0,) * m)

    @property
    def is_identity(self) -> bool:
        return all(x == 0 for x in self.v) and all(x == 0 for x in self.k)

    def __repr__(self) -> str:
        return f"LatticeElement(v={list(self.v)}, k={list(self.k)})"


@dataclass(frozen=True)
class Relation:
    """One defining relation of the lattice presentation."""

    kind: str  # "commutator" | "conjugation"
    left: str
    right: str
    exponents: Optional[tuple[int, ...]] = None

    def render(self, fiber_names: Sequence[str]) -> str:
        if self.kind == "commutator":
            return f"[{self.left}, {self.right}] = 1"
        parts = []
        for name, e in zip(fiber_names, self.exponents or ()):
            if e == 0:
                continue
            parts.append(name if e == 1 else f"{name}^{e}")
        rhs = " ".join(parts) if parts else "1"
        return f"{self.left} {self.right} {self.left}^-1 = {rhs}"


@dataclass(frozen=True)
class Presentation:
    fiber_generators: tuple[str, ...]
    base_generators: tuple[str, ...]
    relations: tuple[Relation, ...]

    def rendered(self) -> list[str]:
        return [r.render(self.fiber_generators) for r in self.relations]


class Lattice:
    """The lattice L = sigma^-1 Z^n x| rho Z^m attached to a compatible pair."""

    def __init__(self, pair: CompatiblePair, power_budget: int = 10**6) -> None:
        self.pair = pair
        self.power_budget = power_budget
        self._hol_cache: dict[tuple[int, ...], IntMatrix] = {}
        self._inv_cache: list[IntMatrix] = [
            inverse_unimodular([list(r) for r in a]) for a in pair.holonomy
        ]

    @property
    def n(self) -> int:
        return self.pair.n

    @property
    def m(self) -> int:
        return self.pair.m

    @property
    def sys(self) -> DiagSystem:
        return self.pair.sys

    def identity(self) -> LatticeElement:
        return LatticeElement.identity(self.n, self.m)

    def element(self, v: Sequence[int], k: Sequence[int]) -> LatticeElement:
        e = LatticeElement.of(v, k)
        if len(e.v) != self.n or len(e.k) != self.m:
            raise ValueError("element shape does not match the lattice")
        return e

    # -- exact integer layer

    def holonomy(self, k: Sequence[int]) -> IntMatrix:
        """M(k) = prod_j A_j^{k_j}, exact; a homomorphism Z^m -> SL_n(Z)."""
        key = tuple(int(x) for x in k)
        if len(key) != self.m:
            raise ValueError("wrong holonomy exponent length")
        if max((abs(x) for x in key), default=0) > self.power_budget:
            raise Overflow(f"|k| exceeds power budget {self.power_budget}", k=list(key))
        cached = self._hol_cache.get(key)
        if cached is not None:
            return [list(r) for r in cached]
        out = identity_int(self.n)
        for j, kj in enumerate(key):
            if kj == 0:
                continue
            base = (
                [list(r) for r in self.pair.holonomy[j]]
                if kj > 0
                else self._inv_cache[j]
            )
            out = mat_mul_int(out, mat_pow_int(base, abs(kj)))
        self._hol_cache[key] = out
        return [list(r) for r in out]

    def mul(self, a: LatticeElement, b: LatticeElement) -> LatticeElement:
        """(v,k)(w,l) = (v + M(k) w, k + l), exact."""
        mk = self.holonomy(a.k)
        v = tuple(
            a.v[i] + sum(mk[i][j] * b.v[j] for j in range(self.n)) for i in range(self.n)
        )
        k = tuple(x + y for x, y in zip(a.k, b.k))
        return LatticeElement(v, k)

    def inv(self, a: LatticeElement) -> LatticeElement:
        """(v,k)^-1 = (-M(-k) v, -k), exact."""
        mk = self.holonomy(tuple(-x for x in a.k))
        v = tuple(-sum(mk[i][j] * a.v[j] for j in range(self.n)) for i in range(self.n))
        return LatticeElement(v, tuple(-x for x in a.k))

    # -- embedding into the ambient group

    def to_group(self, a: LatticeElement) -> GroupElement:
        x = self.pair._sigma_inv @ np.array(a.v, dtype=float)
        t = self.pair.rho @ np.array(a.k, dtype=float)
        return GroupElement(self.sys, x, t)

    def membership(self, g: GroupElement, tol: float = EMBED_TOL) -> Optional[LatticeElement]:
        """Invert the embedding: (v, k) = (sigma x, rho^-1 t) if both are near-integer."""
        if tol <= 0:
            raise ValueError("tol must be positive")
        v_star = self.pair.sigma @ g.x
        k_star = self.pair._rho_inv @ g.t
        v = np.rint(v_star)
        k = np.rint(k_star)
        if np.max(np.abs(v_star - v), initial=0.0) > tol:
            return None
        if np.max(np.abs(k_star - k), initial=0.0) > tol:
            return None
        return LatticeElement(tuple(int(x) for x in v), tuple(int(x) for x in k))

    def reduce(self, g: GroupElement) -> tuple[LatticeElement, GroupElement]:
        """Split g = gamma * r with gamma in the lattice and r in the fundamental
        domain (sigma^-1 [0,1)^n) x (rho [0,1)^m).

        Follows the constructive step of the co-compactness proof: peel the
        base coordinate first, undo the holonomy twist, then peel the fiber.
        A guard digit in the floor keeps reduce idempotent under f64 noise.
        """
        u = self.pair._rho_inv @ g.t
        k = np.floor(u + FLOOR_GUARD)
        y = np.maximum(u - k, 0.0)
        k_int = tuple(int(x) for x in k)
        if max((abs(x) for x in k_int), default=0) > self.power_budget:
            raise Overflow(f"|k| exceeds power budget {self.power_budget}", k=list(k_int))
        mu = self.sys.d @ (self.pair.rho @ np.array(k_int, dtype=float))
        if np.max(np.abs(mu), initial=0.0) > EXP_RANGE:
            raise Overflow("holonomy exponent outside binary64 range", k=list(k_int))
        w = self.pair.sigma @ (np.exp(-mu) * g.x)
        l = np.floor(w + FLOOR_GUARD)
        z = np.maximum(w - l, 0.0)
        l_int = [int(x) for x in l]
        mk = self.holonomy(k_int)
        v = tuple(sum(mk[i][j] * l_int[j] for j in range(self.n)) for i in range(self.n))
        gamma = LatticeElement(v, k_int)
        r = GroupElement(self.sys, self.pair._sigma_inv @ z, self.pair.rho @ y)
        return gamma, r

    def presentation(self) -> Presentation:
        """Generators x_1..x_n (fiber), t_1..t_m (base); conjugation exponents
        are the columns of the holonomy matrices."""
        xs = tuple(f"x{i + 1}" for i in range(self.n))
        ts = tuple(f"t{j + 1}" for j in range(self.m))
        rels: list[Relation] = []
        for i in range(self.n):
            for j in range(i + 1, self.n):
                rels.append(Relation("commutator", xs[i], xs[j]))
        for i in range(self.m):
            for j in range(i + 1, self.m):
                rels.append(Relation("commutator", ts[i], ts[j]))
        for j in range(self.m):
            a = self.pair.holonomy[j]
            for i in range(self.n):
                col = tuple(a[s][i] for s in range(self.n))
                rels.append(Relation("conjugation", ts[j], xs[i], col))
        return Presentation(xs, ts, tuple(rels))

    def __repr__(self) -> str:
        return f"Lattice(n={self.n}, m={self.m}, residual={self.pair.residual:.2e})"


def lat_mul(lat: Lattice, a: LatticeElement, b: LatticeElement) -> LatticeElement:
    return lat.mul(a, b)


def lat_inv(lat: Lattice, a: LatticeElement) -> LatticeElement:
    return lat.inv(a)


def lat_to_group(lat: Lattice, a: LatticeElement) -> GroupElement:
    return lat.to_group(a)
