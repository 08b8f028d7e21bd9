"""Splittable lattices in the completely solvable groups R^n x|_eta R^m."""

from .classify import (
    Automorphism,
    CommensurabilityDecision,
    CommonSublattice,
    EquivalenceDecision,
    apply_automorphism,
    build_automorphism,
    common_sublattice,
    commensurable,
    compose,
    delta_of,
    equivalence_decision,
    equivalent_by,
    search_equivalence,
    valid_permutations,
)
from .exactmat import ExactMatrix, quad_solve_char2
from .factory import HyperbolicInput, family_3d, from_hyperbolic, from_hyperbolic_exact_2d
from .group import (
    AlgebraElement,
    DiagSystem,
    GroupElement,
    bracket,
    embed_gl,
    exp_g,
    group_inv,
    group_mul,
    log_g,
    phi1,
    validate_diag_system,
)
from .intlinalg import (
    IntLattice,
    hnf,
    lattice_intersect,
    matrix_in_GLQ,
    reconstruct_fraction,
    snf,
    zrank_intersection,
)
from .lattice import (
    CompatiblePair,
    Lattice,
    LatticeElement,
    Presentation,
    lat_inv,
    lat_mul,
    lat_to_group,
    verify_pair,
    verify_pair_exact,
)
from .scalars import Quad

__version__ = "0.1.0"

__all__ = [
    "AlgebraElement",
    "Automorphism",
    "CommensurabilityDecision",
    "CommonSublattice",
    "CompatiblePair",
    "DiagSystem",
    "EquivalenceDecision",
    "ExactMatrix",
    "GroupElement",
    "HyperbolicInput",
    "IntLattice",
    "Lattice",
    "LatticeElement",
    "Presentation",
    "Quad",
    "apply_automorphism",
    "bracket",
    "build_automorphism",
    "commensurable",
    "common_sublattice",
    "compose",
    "delta_of",
    "embed_gl",
    "equivalence_decision",
    "equivalent_by",
    "exp_g",
    "family_3d",
    "from_hyperbolic",
    "from_hyperbolic_exact_2d",
    "group_inv",
    "group_mul",
    "hnf",
    "lat_inv",
    "lat_mul",
    "lat_to_group",
    "lattice_intersect",
    "log_g",
    "matrix_in_GLQ",
    "phi1",
    "quad_solve_char2",
    "reconstruct_fraction",
    "search_equivalence",
    "snf",
    "valid_permutations",
    "validate_diag_system",
    "verify_pair",
    "verify_pair_exact",
    "zrank_intersection",
]
