"""Automorphisms of the ambient group, lattice equivalence, commensurability.

An automorphism is determined by a permutation tau with nonzero scales c_i on
the fiber, the induced base map delta (a least-squares function of tau and the
diagonal data), and a shear parameter U; the base-to-fiber shear never affects
lattice questions, which only see alpha and delta.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    InexactInput,
    InvalidShear,
    InvalidTau,
    MixedField,
    NotCommensurable,
    Singular,
    TooLarge,
    ZeroScale,
)
from .exactmat import ExactMatrix
from .group import DiagSystem, GroupElement, phi1_vec
from .intlinalg import (
    det_int,
    lattice_intersect,
    matrix_in_GLQ,
    reconstruct_fraction,
    snf,
    zrank_intersection,
)
from .lattice import Lattice

PERM_TOL = 1e-9
EQUIV_TOL = 1e-6
DENOM_BOUND = 10**6

Perm = tuple[int, ...]


def identity_perm(n: int) -> Perm:
    return tuple(range(n))


def invert_perm(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def compose_perm(p: Perm, q: Perm) -> Perm:
    """(p o q)(i) = p(q(i))."""
    return tuple(p[q[i]] for i in range(len(p)))


def _permuted_rows(omega: np.ndarray, tau: Perm) -> np.ndarray:
    return omega[list(tau), :]


def delta_of(sys: DiagSystem, tau: Perm, tol: float = PERM_TOL) -> np.ndarray:
    """Base map delta for tau: least squares of Omega delta = Omega[tau rows].

    Raises InvalidTau when the defining element constraint
    sum_l d_i^(l) delta_{lk} = d_{tau(i)}^(k) is not met within tol.
    """
    omega = sys.omega
    target = _permuted_rows(omega, tau)
    gram = omega.T @ omega
    delta = np.linalg.solve(gram, omega.T @ target)
    if float(np.max(np.abs(omega @ delta - target))) > tol:
        raise InvalidTau(f"permutation {tau} admits no base map", tau=tau)
    return delta


def valid_permutations(sys: DiagSystem, tol: float = PERM_TOL) -> tuple[Perm, ...]:
    """All tau in S_n whose least-squares delta satisfies the element constraint.

    Brute force over S_n (n <= 10), returned in lexicographic order; always
    contains the identity and is closed under composition and inverses.
    """
    if sys.n > 10:
        raise TooLarge(f"n = {sys.n} > 10", n=sys.n)
    omega = sys.omega
    gram_solve = np.linalg.inv(omega.T @ omega) @ omega.T
    out = []
    for tau in itertools.permutations(range(sys.n)):
        target = _permuted_rows(omega, tau)
        delta = gram_solve @ target
        if float(np.max(np.abs(omega @ delta - target))) <= tol:
            out.append(tau)
    return tuple(out)


def alpha_matrix_float(tau: Perm, c: Sequence[float]) -> np.ndarray:
    """Matrix of alpha; alpha(e_i) = c_i e_{tau^-1(i)}."""
    n = len(tau)
    inv = invert_perm(tau)
    a = np.zeros((n, n))
    for i in range(n):
        a[inv[i], i] = float(c[i])
    return a


def alpha_matrix_exact(tau: Perm, c: Sequence[Fraction], d: Optional[int] = None) -> ExactMatrix:
    n = len(tau)
    inv = invert_perm(tau)
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        rows[inv[i]][i] = Fraction(c[i])
    return ExactMatrix(rows, d)


@dataclass(frozen=True, eq=False)
class Automorphism:
    """phi(x, t) = (alpha x + beta(t), delta t) with gamma identically zero."""

    sys: DiagSystem
    tau: Perm
    c: np.ndarray
    delta: np.ndarray
    U: np.ndarray
    certified_residual: float = 0.0
    c_exact: Optional[tuple[Fraction, ...]] = None
    delta_exact: Optional[ExactMatrix] = None

    @property
    def is_exact(self) -> bool:
        return self.c_exact is not None and self.delta_exact is not None

    def alpha(self) -> np.ndarray:
        return alpha_matrix_float(self.tau, self.c)

    def alpha_exact(self, d: Optional[int] = None) -> ExactMatrix:
        if self.c_exact is None:
            raise InexactInput("automorphism has no exact scales")
        return alpha_matrix_exact(self.tau, self.c_exact, d)

    def beta(self, t: Sequence[float]) -> np.ndarray:
        return _beta(self.sys, self.delta, self.U, t)

    def __call__(self, g: GroupElement) -> GroupElement:
        return apply_automorphism(self, g)

    def inverse(self) -> "Automorphism":
        tau_inv = invert_perm(self.tau)
        c_inv = np.array([1.0 / self.c[self.tau[j]] for j in range(len(self.tau))])
        delta_inv = np.linalg.inv(self.delta)
        alpha_inv = alpha_matrix_float(tau_inv, c_inv)
        u_inv = -alpha_inv @ self.U @ delta_inv
        c_exact = None
        if self.c_exact is not None:
            c_inv_exact = tuple(1 / self.c_exact[self.tau[j]] for j in range(len(self.tau)))
            c_exact = c_inv_exact
        delta_exact = None
        if self.delta_exact is not None:
            delta_exact = self.delta_exact.inverse()
        return Automorphism(
            sys=self.sys,
            tau=tau_inv,
            c=c_inv,
            delta=delta_inv,
            U=u_inv,
            certified_residual=self.certified_residual,
            c_exact=c_exact,
            delta_exact=delta_exact,
        )


def _beta(sys: DiagSystem, delta: np.ndarray, u: np.ndarray, t) -> np.ndarray:
    """beta(t) = sum_k (delta(t).Delta)^k / (k+1)! U t, via phi1 on the diagonal."""
    t = np.asarray(t, dtype=float)
    mu = sys.d @ (delta @ t)
    return phi1_vec(mu) * (u @ t)


def build_automorphism(
    sys: DiagSystem,
    tau: Perm,
    c: Sequence[Union[int, float, Fraction]],
    U: Optional[Sequence[Sequence[float]]] = None,
    tol: float = PERM_TOL,
    seed: int = 0,
    samples: int = 100,
) -> Automorphism:
    """Assemble (tau, c, delta_tau, U) and certify the intertwining relation
    alpha eta(t) = eta(delta t) alpha on ``samples`` random t.

    The shear U is also certified against the cocycle
    beta(t+s) = beta(t) + eta(delta t) beta(s).  For a single base direction
    every U passes; in higher base rank integrability forces each row of U to
    be proportional to the matching row of Omega @ delta, and other shears are
    rejected with InvalidShear (the series formula alone does not make them
    homomorphisms).
    """
    tau = tuple(int(x) for x in tau)
    if sorted(tau) != list(range(sys.n)):
        raise InvalidTau(f"{tau} is not a permutation of 0..{sys.n - 1}", tau=tau)
    for i, ci in enumerate(c):
        if ci == 0:
            raise ZeroScale(f"scale c_{i + 1} is zero", i=i)
    delta = delta_of(sys, tau, tol)
    u = np.zeros((sys.n, sys.m)) if U is None else np.array(U, dtype=float)
    if u.shape != (sys.n, sys.m):
        raise ValueError("U must be n x m")
    c_float = np.array([float(x) for x in c])
    alpha = alpha_matrix_float(tau, c_float)

    rng = np.random.default_rng(seed)
    worst = 0.0
    u_scale = max(1.0, float(np.max(np.abs(u))))
    for _ in range(samples):
        t = rng.uniform(-5.0, 5.0, size=sys.m)
        lhs = alpha * sys.eta_diag(t)[None, :]  # alpha @ diag(eta(t))
        rhs = sys.eta_diag(delta @ t)[:, None] * alpha  # diag(eta(delta t)) @ alpha
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    if worst > tol * max(1.0, float(np.max(np.abs(c_float)))):
        raise InvalidTau(
            f"intertwining residual {worst:.3e} exceeds {tol:.1e}", tau=tau, residual=worst
        )
    if sys.m > 1 and np.any(u):
        shear_worst = 0.0
        for _ in range(samples):
            t = rng.uniform(-1.5, 1.5, size=sys.m)
            s = rng.uniform(-1.5, 1.5, size=sys.m)
            bt = _beta(sys, delta, u, t)
            bs = _beta(sys, delta, u, s)
            bts = _beta(sys, delta, u, t + s)
            shear_worst = max(
                shear_worst,
                float(np.max(np.abs(bts - bt - sys.eta_diag(delta @ t) * bs))),
            )
        if shear_worst > 1e-8 * u_scale:
            raise InvalidShear(
                f"shear cocycle residual {shear_worst:.3e}; rows of U must be "
                "proportional to the rows of Omega @ delta",
                residual=shear_worst,
            )

    c_exact = None
    if all(isinstance(x, (int, Fraction)) for x in c):
        c_exact = tuple(Fraction(x) for x in c)
    delta_exact = _exact_delta_candidate(sys, tau, delta, tol)
    return Automorphism(
        sys=sys,
        tau=tau,
        c=c_float,
        delta=delta,
        U=u,
        certified_residual=worst,
        c_exact=c_exact,
        delta_exact=delta_exact,
    )


def _exact_delta_candidate(
    sys: DiagSystem, tau: Perm, delta: np.ndarray, tol: float
) -> Optional[ExactMatrix]:
    """Small-denominator rational lift of delta, when one exists.

    The identity gives I exactly; other taus get a continued-fraction lift
    that is kept only if it still satisfies the element constraint.
    """
    if tau == identity_perm(sys.n):
        return ExactMatrix.identity(sys.m)
    rows = []
    for r in delta:
        row = []
        for x in r:
            f = reconstruct_fraction(float(x), 10**4, 1e-9)
            if f is None:
                return None
            row.append(f)
        rows.append(row)
    cand = ExactMatrix(rows)
    target = _permuted_rows(sys.omega, tau)
    if float(np.max(np.abs(sys.omega @ cand.to_float() - target))) > tol:
        return None
    return cand


def apply_automorphism(phi: Automorphism, g: GroupElement) -> GroupElement:
    """phi(x, t) = (alpha x + beta(t), delta t)."""
    x = phi.alpha() @ g.x + phi.beta(g.t)
    t = phi.delta @ g.t
    return GroupElement(phi.sys, x, t)


def compose(after: Automorphism, before: Automorphism) -> Automorphism:
    """Parameters of g -> after(before(g))."""
    inv_before = invert_perm(before.tau)
    tau = compose_perm(before.tau, after.tau)
    c = np.array(
        [before.c[i] * after.c[inv_before[i]] for i in range(len(before.tau))]
    )
    delta = after.delta @ before.delta
    u = after.alpha() @ before.U + after.U @ before.delta
    c_exact = None
    if before.c_exact is not None and after.c_exact is not None:
        c_exact = tuple(
            before.c_exact[i] * after.c_exact[inv_before[i]] for i in range(len(before.tau))
        )
    delta_exact = None
    if before.delta_exact is not None and after.delta_exact is not None:
        delta_exact = after.delta_exact @ before.delta_exact
    return Automorphism(
        sys=before.sys,
        tau=tau,
        c=c,
        delta=delta,
        U=u,
        certified_residual=max(before.certified_residual, after.certified_residual),
        c_exact=c_exact,
        delta_exact=delta_exact,
    )


# ---------------------------------------------------------------------------
# Equivalence of lattices by an automorphism
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EquivalenceDecision:
    equivalent: bool
    certification: str  # "exact" | "tolerance"
    fiber_matrix: Optional[Union[ExactMatrix, np.ndarray]]
    base_matrix: Optional[Union[ExactMatrix, np.ndarray]]
    fiber_det: Optional[int]
    base_det: Optional[int]
    residual: float
    reason: str = ""


def equivalence_decision(
    phi: Automorphism, lat1: Lattice, lat2: Lattice, tol: float = EQUIV_TOL
) -> EquivalenceDecision:
    """Check nu alpha sigma^-1 in GL_n(Z) and varrho^-1 delta rho in GL_m(Z).

    Determinant signs are retained: the theorem statement allows GL, and the
    sign is reported for auditing.  Exact inputs are decided exactly.
    """
    p1, p2 = lat1.pair, lat2.pair
    exact_ready = (
        p1.is_exact
        and p2.is_exact
        and phi.is_exact
    )
    if exact_ready:
        try:
            alpha_e = phi.alpha_exact()
            b = p2.sigma_exact @ alpha_e @ p1.sigma_exact.inverse()
            cmat = p2.rho_exact.inverse() @ phi.delta_exact @ p1.rho_exact
            if b.is_integer and cmat.is_integer:
                bd = det_int(b.int_lists())
                cd = det_int(cmat.int_lists())
                ok = abs(bd) == 1 and abs(cd) == 1
                return EquivalenceDecision(
                    equivalent=ok,
                    certification="exact",
                    fiber_matrix=b,
                    base_matrix=cmat,
                    fiber_det=bd,
                    base_det=cd,
                    residual=0.0,
                    reason="" if ok else "determinant is not a unit",
                )
            return EquivalenceDecision(
                equivalent=False,
                certification="exact",
                fiber_matrix=b,
                base_matrix=cmat,
                fiber_det=None,
                base_det=None,
                residual=0.0,
                reason="non-integer transported basis",
            )
        except MixedField:
            pass  # incomparable fields; fall through to the float check

    b = p2.sigma @ phi.alpha() @ np.linalg.inv(p1.sigma)
    cm = np.linalg.inv(p2.rho) @ phi.delta @ p1.rho
    b_round = np.rint(b)
    c_round = np.rint(cm)
    residual = max(float(np.max(np.abs(b - b_round))), float(np.max(np.abs(cm - c_round))))
    if residual > tol:
        return EquivalenceDecision(
            equivalent=False,
            certification="tolerance",
            fiber_matrix=b,
            base_matrix=cm,
            fiber_det=None,
            base_det=None,
            residual=residual,
            reason="transported bases are not near-integer",
        )
    bd = det_int([[int(x) for x in r] for r in b_round])
    cd = det_int([[int(x) for x in r] for r in c_round])
    ok = abs(bd) == 1 and abs(cd) == 1
    return EquivalenceDecision(
        equivalent=ok,
        certification="tolerance",
        fiber_matrix=b_round,
        base_matrix=c_round,
        fiber_det=bd,
        base_det=cd,
        residual=residual,
        reason="" if ok else "determinant is not a unit",
    )


def equivalent_by(
    phi: Automorphism, lat1: Lattice, lat2: Lattice, tol: float = EQUIV_TOL
) -> bool:
    return equivalence_decision(phi, lat1, lat2, tol).equivalent


def _preimage_lattice_basis(g: ExactMatrix) -> ExactMatrix:
    """Column basis of {y : G y integral} for rational G with full column rank."""
    den = 1
    rows = g.rational_lists()
    for row in rows:
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
    n_int = [[int(x * den) for x in row] for row in rows]
    s, _, v = snf(n_int)
    r = g.cols
    diag = [s[i][i] for i in range(r)]
    if any(x == 0 for x in diag):
        raise Singular("preimage of a rank-deficient map")
    cols = []
    for i in range(r):
        scale = Fraction(den, diag[i])
        cols.append([Fraction(v[j][i]) * scale for j in range(r)])
    return ExactMatrix([list(row) for row in zip(*cols)])


def search_equivalence(
    lat1: Lattice, lat2: Lattice, denom_bound: int = DENOM_BOUND
) -> Optional[Automorphism]:
    """Search for an automorphism carrying lat1 onto lat2 (exact inputs only).

    For each valid tau with an exactly representable delta, the scales c that
    make nu alpha sigma^-1 integral form a lattice: the irrational parts must
    vanish (a rational kernel) and the rational parts must be integral (a
    preimage lattice computed through Smith reduction).  Candidates from that
    lattice with denominators within ``denom_bound`` are checked against both
    theorem conditions exactly.  ``None`` means no witness within bounds, not
    a disproof.
    """
    p1, p2 = lat1.pair, lat2.pair
    if not (p1.is_exact and p2.is_exact):
        raise InexactInput("search_equivalence needs exact sigma/rho on both sides")
    if lat1.n > 10:
        raise TooLarge(f"n = {lat1.n} > 10", n=lat1.n)
    sys = lat1.sys
    n = lat1.n
    sigma_inv = p1.sigma_exact.inverse()
    nu = p2.sigma_exact

    for tau in valid_permutations(sys):
        delta_e = _exact_delta_candidate(sys, tau, delta_of(sys, tau), PERM_TOL)
        if delta_e is None:
            continue
        try:
            # coefficient matrix of c_i inside nu alpha sigma^-1 (entry-linear in c)
            mats = [
                nu @ alpha_matrix_exact(tau, _unit_fracs(n, i)) @ sigma_inv
                for i in range(n)
            ]
        except MixedField:
            raise InexactInput("exact data live in incomparable fields")
        irr_rows = []
        rat_rows = []
        for r in range(n):
            for s in range(n):
                irr_rows.append([mats[i].irrational_part()[r, s] for i in range(n)])
                rat_rows.append([mats[i].rational_part()[r, s] for i in range(n)])
        s_mat = ExactMatrix(irr_rows)
        t_mat = ExactMatrix(rat_rows)
        if s_mat.rank() == 0:
            null = ExactMatrix.identity(n)
        else:
            null = s_mat.nullspace()
            if null is None:
                continue
        g = t_mat @ null
        if g.rank() < g.cols:
            continue
        try:
            y_basis = _preimage_lattice_basis(g)
        except Singular:
            continue
        c_basis = null @ y_basis  # n x r, columns generate candidate scale vectors
        cb_cols = []
        for j in range(c_basis.cols):
            col = list(c_basis.column(j))
            lead = next((x for x in col if x != 0), None)
            if lead is not None and lead < 0:
                col = [-x for x in col]
            cb_cols.append(col)
        c_basis = ExactMatrix([list(row) for row in zip(*cb_cols)])
        r = c_basis.cols
        radius = 1 if r == 1 else 3
        ordered = sorted(range(-radius, radius + 1), key=lambda v: (abs(v), v < 0))
        for coeffs in itertools.product(ordered, repeat=r):
            if all(x == 0 for x in coeffs):
                continue
            c = [
                sum((c_basis[i, j] * coeffs[j] for j in range(r)), Fraction(0))
                for i in range(n)
            ]
            if any(x == 0 for x in c):
                continue
            if any(Fraction(x).denominator > denom_bound for x in c):
                continue
            phi = build_automorphism(sys, tau, [Fraction(x) for x in c])
            if equivalence_decision(phi, lat1, lat2).equivalent:
                return phi
    return None


def _unit_fracs(n: int, i: int) -> list[Fraction]:
    out = [Fraction(0)] * n
    out[i] = Fraction(1)
    return out


# ---------------------------------------------------------------------------
# Commensurability
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CommensurabilityDecision:
    method: str
    verdict: str  # "commensurable" | "not-commensurable" | "no-witness-at-bound"
    certification: str  # "exact" | "tolerance"
    fiber_witness: Optional[ExactMatrix]  # nu sigma^-1 as a rational matrix
    base_witness: Optional[ExactMatrix]  # varrho^-1 rho as a rational matrix
    denom_bound: Optional[int] = None
    tol: Optional[float] = None
    fiber_rank: Optional[int] = None
    base_rank: Optional[int] = None

    @property
    def commensurable(self) -> Optional[bool]:
        if self.verdict == "commensurable":
            return True
        if self.verdict == "not-commensurable":
            return False
        return None


def commensurable(
    lat1: Lattice,
    lat2: Lattice,
    method: str = "rational-test",
    denom_bound: int = DENOM_BOUND,
    tol: float = 1e-9,
) -> CommensurabilityDecision:
    """Decide commensurability of two lattices over the same system.

    rational-test checks nu sigma^-1 and varrho^-1 rho for rationality
    (exactly when exact data exist, else by continued-fraction reconstruction
    bounded by ``denom_bound``).  rank-test computes the Z-ranks of the two
    factor intersections and requires (n, m); it needs exact inputs.  Numeric
    failures are reported as no-witness-at-bound, never as a hard no.
    """
    p1, p2 = lat1.pair, lat2.pair
    n, m = lat1.n, lat1.m
    if method not in ("rational-test", "rank-test"):
        raise ValueError(f"unknown method {method!r}")

    exact_ready = p1.is_exact and p2.is_exact
    if exact_ready:
        try:
            fiber = p2.sigma_exact @ p1.sigma_exact.inverse()
            base = p2.rho_exact.inverse() @ p1.rho_exact
        except MixedField:
            exact_ready = False

    if method == "rank-test":
        if not exact_ready:
            raise InexactInput("rank-test needs exact sigma/rho on both sides")
        fiber_rank = zrank_intersection(p1.sigma_exact.inverse(), p2.sigma_exact.inverse())
        base_rank = zrank_intersection(p1.rho_exact, p2.rho_exact)
        ok = fiber_rank == n and base_rank == m
        return CommensurabilityDecision(
            method=method,
            verdict="commensurable" if ok else "not-commensurable",
            certification="exact",
            fiber_witness=_rational_or_none(fiber),
            base_witness=_rational_or_none(base),
            fiber_rank=fiber_rank,
            base_rank=base_rank,
        )

    if exact_ready:
        fw = _rational_or_none(fiber)
        bw = _rational_or_none(base)
        ok = fw is not None and bw is not None
        return CommensurabilityDecision(
            method=method,
            verdict="commensurable" if ok else "not-commensurable",
            certification="exact",
            fiber_witness=fw,
            base_witness=bw,
        )

    fiber_f = p2.sigma @ np.linalg.inv(p1.sigma)
    base_f = np.linalg.inv(p2.rho) @ p1.rho
    fw = matrix_in_GLQ(fiber_f, denom_bound, tol)
    bw = matrix_in_GLQ(base_f, denom_bound, tol)
    ok = fw is not None and bw is not None
    return CommensurabilityDecision(
        method=method,
        verdict="commensurable" if ok else "no-witness-at-bound",
        certification="tolerance",
        fiber_witness=fw,
        base_witness=bw,
        denom_bound=denom_bound,
        tol=tol,
    )


def _rational_or_none(m: ExactMatrix) -> Optional[ExactMatrix]:
    if m.is_rational:
        return ExactMatrix(m.rational_lists())
    return None


@dataclass(frozen=True, eq=False)
class CommonSublattice:
    """Factor-wise common sublattice data in sigma- and rho-coordinates."""

    fiber_basis: ExactMatrix
    base_basis: ExactMatrix
    fiber_indices: tuple[int, int]
    base_indices: tuple[int, int]
    index1: int
    index2: int
    certification: str


def common_sublattice(
    lat1: Lattice,
    lat2: Lattice,
    denom_bound: int = DENOM_BOUND,
    tol: float = 1e-9,
) -> CommonSublattice:
    """Common finite-index sublattice with both subgroup indices.

    The intersection splits factor-wise; in sigma-coordinates the fiber factor
    is Z^n meet Q^-1 Z^n for Q = nu sigma^-1, in rho-coordinates the base
    factor is Z^m meet R^-1 Z^m for R = varrho^-1 rho.  The index on each side
    is the product of its factor indices.
    """
    decision = commensurable(lat1, lat2, "rational-test", denom_bound, tol)
    if decision.commensurable is not True:
        raise NotCommensurable(f"verdict: {decision.verdict}")
    q = decision.fiber_witness
    r = decision.base_witness
    n, m = lat1.n, lat1.m
    fiber_c, f1, f2 = lattice_intersect(ExactMatrix.identity(n), q.inverse())
    base_c, b1, b2 = lattice_intersect(ExactMatrix.identity(m), r.inverse())
    return CommonSublattice(
        fiber_basis=fiber_c.basis,
        base_basis=base_c.basis,
        fiber_indices=(f1, f2),
        base_indices=(b1, b2),
        index1=f1 * b1,
        index2=f2 * b2,
        certification=decision.certification,
    )
