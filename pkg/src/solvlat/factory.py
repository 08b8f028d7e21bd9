"""Build diagonal systems and compatible pairs from commuting hyperbolic
integer matrices, numerically for any size and exactly for 2x2.

The recipe: diagonalize A_1, reuse its eigenbasis for the whole family, take
sigma to be the eigenvector matrix and the diagonal logarithms as the system.
Then sigma e^Delta_j sigma^-1 recovers A_j, so (sigma, I_m) is compatible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    Degenerate,
    DetNotOne,
    EigenvalueOne,
    NotCommuting,
    NotHyperbolic,
    NonPositiveSpectrum,
    RepeatedEigenvalue,
    SharedEigenbasisFailure,
)
from .exactmat import ExactMatrix, quad_solve_char2
from .group import DiagSystem, validate_diag_system
from .intlinalg import IntMatrix, det_int, mat_mul_int
from .lattice import CompatiblePair, verify_pair, verify_pair_exact
from .scalars import Quad

SPECTRAL_GAP = 1e-6
EIGENBASIS_TOL = 1e-8


@dataclass(frozen=True)
class HyperbolicInput:
    """Commuting family of positive hyperbolic SL_n(Z) matrices plus its check record."""

    matrices: tuple[tuple[tuple[int, ...], ...], ...]
    commuting: bool
    det_one: bool
    positive_spectrum: bool
    distinct_spectrum: bool

    @classmethod
    def gather(cls, matrices: Sequence[Sequence[Sequence[int]]]) -> "HyperbolicInput":
        mats = [[[int(x) for x in row] for row in m] for m in matrices]
        n = len(mats[0])
        commuting = all(
            mat_mul_int(a, b) == mat_mul_int(b, a)
            for i, a in enumerate(mats)
            for b in mats[i + 1 :]
        )
        det_one = all(det_int(m) == 1 for m in mats)
        positive = True
        distinct = True
        for m in mats:
            lams = np.linalg.eigvals(np.array(m, dtype=float))
            if np.max(np.abs(lams.imag)) > 1e-9 or np.min(lams.real) <= 0:
                positive = False
            lr = np.sort(lams.real)
            if np.min(np.diff(lr), initial=np.inf) < SPECTRAL_GAP or np.min(
                np.abs(lr - 1.0), initial=np.inf
            ) < SPECTRAL_GAP:
                distinct = False
        return cls(
            matrices=tuple(tuple(tuple(r) for r in m) for m in mats),
            commuting=commuting,
            det_one=det_one,
            positive_spectrum=positive,
            distinct_spectrum=distinct,
        )


def _normalized_eigencolumn(col: np.ndarray) -> np.ndarray:
    col = col / np.max(np.abs(col))
    lead = next(x for x in col if abs(x) > 1e-12)
    return col if lead > 0 else -col


def from_hyperbolic(
    matrices: Sequence[Sequence[Sequence[int]]],
) -> tuple[DiagSystem, CompatiblePair]:
    """Diagonal system and compatible pair (sigma = eigenbasis of A_1, rho = I_m).

    Eigenvalues are ordered strictly decreasing per matrix column pairing;
    each eigencolumn is scaled to unit infinity-norm with a positive leading
    entry.  The produced pair re-anchors on the input matrices exactly.
    """
    mats: list[IntMatrix] = [[[int(x) for x in row] for row in m] for m in matrices]
    if not mats:
        raise ValueError("at least one matrix required")
    n = len(mats[0])
    m = len(mats)
    for a in mats:
        if len(a) != n or any(len(r) != n for r in a):
            raise ValueError("square matrices of one size required")

    for i in range(m):
        for j in range(i + 1, m):
            if mat_mul_int(mats[i], mats[j]) != mat_mul_int(mats[j], mats[i]):
                raise NotCommuting(f"matrices {i} and {j} do not commute", i=i, j=j)
    for j, a in enumerate(mats):
        d = det_int(a)
        if d != 1:
            raise DetNotOne(f"matrix {j} has determinant {d}", j=j, det=d)

    lams, vecs = np.linalg.eig(np.array(mats[0], dtype=float))
    if np.max(np.abs(lams.imag)) > 1e-9:
        raise NonPositiveSpectrum("complex eigenvalues", j=0)
    lams = lams.real
    vecs = vecs.real
    if np.min(lams) <= 0:
        raise NonPositiveSpectrum(f"eigenvalue {np.min(lams):.6g} <= 0", j=0)
    order = np.argsort(-lams)
    lams = lams[order]
    vecs = vecs[:, order]
    if np.min(np.diff(np.sort(lams))) < SPECTRAL_GAP:
        raise RepeatedEigenvalue(f"spectral gap below {SPECTRAL_GAP}", j=0)

    p = np.column_stack([_normalized_eigencolumn(vecs[:, i]) for i in range(n)])

    # shared eigenbasis: read each matrix's eigenvalue off the dominant row
    spectra = np.zeros((n, m))
    for j, a in enumerate(mats):
        af = np.array(a, dtype=float)
        for i in range(n):
            col = p[:, i]
            image = af @ col
            lead = int(np.argmax(np.abs(col)))
            lam = image[lead] / col[lead]
            if np.max(np.abs(image - lam * col)) > EIGENBASIS_TOL:
                raise SharedEigenbasisFailure(
                    f"column {i} is not an eigenvector of matrix {j}", i=i, j=j
                )
            spectra[i, j] = lam
        col_sorted = np.sort(spectra[:, j])
        if np.min(col_sorted) <= 0:
            raise NonPositiveSpectrum(f"matrix {j} has a nonpositive eigenvalue", j=j)
        if np.min(np.diff(col_sorted)) < SPECTRAL_GAP:
            raise RepeatedEigenvalue(f"matrix {j} spectral gap below {SPECTRAL_GAP}", j=j)
        if np.min(np.abs(spectra[:, j] - 1.0)) < SPECTRAL_GAP:
            raise EigenvalueOne(f"matrix {j} has eigenvalue 1", j=j)

    d = np.log(spectra)
    for j in range(m):
        if abs(d[:, j].sum()) > 1e-10:
            raise DetNotOne(f"log-spectrum of matrix {j} does not sum to 0", j=j)
    sys = validate_diag_system(d)
    pair = verify_pair(sys, p, np.eye(m))
    if pair.holonomy_list() != mats:
        raise SharedEigenbasisFailure("re-anchored holonomy differs from the input")
    return sys, pair


def from_hyperbolic_exact_2d(
    a: Sequence[Sequence[int]],
) -> tuple[ExactMatrix, ExactMatrix, DiagSystem, CompatiblePair]:
    """Exact pair for a positive hyperbolic 2x2 matrix over Q(sqrt(disc core)).

    Returns (sigma, E1, sys, pair) with sigma the exact eigenvector matrix
    (columns scaled to unit second coordinate), E1 = diag(lambda1, lambda2)
    decreasing, and sigma E1 sigma^-1 = a with residual exactly 0.
    """
    m = [[int(x) for x in row] for row in a]
    if len(m) != 2 or any(len(r) != 2 for r in m):
        raise ValueError("2x2 matrix required")
    d = det_int(m)
    if d != 1:
        raise DetNotOne(f"determinant {d}", det=d)
    tr = m[0][0] + m[1][1]
    if tr <= 2:
        raise NotHyperbolic(f"trace {tr} <= 2", trace=tr)
    lam1, lam2 = quad_solve_char2(m)

    field_d = lam1.d if isinstance(lam1, Quad) else None
    sigma = ExactMatrix([[_eigvec_entry(m, lam1), _eigvec_entry(m, lam2)], [1, 1]], field_d)
    e1 = ExactMatrix.diagonal([lam1, lam2], field_d)
    pair = verify_pair_exact(sigma, [e1])
    return sigma, e1, pair.sys, pair


def _eigvec_entry(m: IntMatrix, lam) -> object:
    """First coordinate of the lam-eigenvector normalized to (x, 1).

    For [[a, b], [c, e]] the eigenvector is (b, lam - a) when b != 0, else
    (lam - e, c); integer hyperbolic det-one input always hits b != 0 or
    c != 0 since triangular SL_2(Z) matrices have trace <= 2.
    """
    a, b = m[0]
    c, e = m[1]
    if b != 0:
        return b / (lam - a)
    if c != 0:
        return (lam - e) / c
    raise NotHyperbolic("diagonal matrix cannot be hyperbolic with det 1")


def family_3d(k: int, l: int) -> IntMatrix:
    """The 3x3 det-one family [[k^2+1, 0, k], [0, 1, l], [k, l, l^2+1]].

    k = 0 or l = 0 makes 1 an eigenvalue (det(A - I) = -k^2 l^2), which the
    diagonal system cannot accept, hence Degenerate.
    """
    k, l = int(k), int(l)
    if k == 0 or l == 0:
        raise Degenerate("kl = 0 puts 1 in the spectrum", k=k, l=l)
    out = [
        [k * k + 1, 0, k],
        [0, 1, l],
        [k, l, l * l + 1],
    ]
    assert det_int(out) == 1
    return out
