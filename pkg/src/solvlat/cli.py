"""Command-line interface: every subcommand reads JSON documents, calls one
library operation, and writes a result document to stdout (or --output).

Exit codes: 0 success, 1 domain error (structured error JSON), 2 malformed
input.  Output is deterministic for fixed inputs, flags, and --seed.
"""

from __future__ import annotations

import argparse
import sys as _sys
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import io
from .classify import (
    Automorphism,
    build_automorphism,
    commensurable,
    common_sublattice,
    delta_of,
    equivalence_decision,
    search_equivalence,
    valid_permutations,
)
from .errors import InexactInput, InvalidDiagSystem, ParseError, SolvlatError
from .factory import family_3d, from_hyperbolic, from_hyperbolic_exact_2d
from .group import DiagSystem, validate_diag_system
from .lattice import Lattice, verify_pair
from .scalars import Quad


def _read_json(path: str) -> dict:
    try:
        if path == "-":
            return io.loads(_sys.stdin.read())
        with open(path, "r", encoding="utf-8") as fh:
            return io.loads(fh.read())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}")


def _single_matrix_payload(doc: dict) -> dict:
    payload = io.check_document(doc, "matrix")
    mats = payload.get("matrices")
    if not isinstance(mats, list) or len(mats) != 1:
        raise ParseError("expected exactly one matrix in the document")
    return mats[0]


def _emit(args, doc: dict) -> None:
    text = io.dumps(doc)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load_lattice(path: str) -> Lattice:
    return Lattice(io.parse_pair(_read_json(path)))


def _parse_scalar_auto(s):
    if isinstance(s, dict):
        return io.parse_exact_scalar(s)
    if isinstance(s, str) and ("." in s or "e" in s or "E" in s):
        return io.parse_float(s)
    return io.parse_fraction(s)


def encode_automorphism(phi: Automorphism) -> dict:
    c = (
        [io.encode_scalar(x) for x in phi.c_exact]
        if phi.c_exact is not None
        else [io.encode_float(x) for x in phi.c]
    )
    return io.document(
        "automorphism",
        {
            "tau": [io.encode_int(i) for i in phi.tau],
            "c": c,
            "delta": io.encode_float_matrix(phi.delta),
            "U": io.encode_float_matrix(phi.U),
            "certified_residual": io.encode_float(phi.certified_residual),
            "delta_exact": (
                io.encode_exact_matrix(phi.delta_exact) if phi.delta_exact is not None else None
            ),
        },
    )


def parse_automorphism(doc: dict, sys: DiagSystem, seed: int) -> Automorphism:
    payload = io.check_document(doc, "automorphism")
    try:
        tau = tuple(int(io.parse_fraction(x)) for x in payload["tau"])
        c = [_parse_scalar_auto(x) for x in payload["c"]]
        u = io.parse_float_matrix(payload["U"])
    except KeyError as exc:
        raise ParseError(f"automorphism payload missing {exc}")
    return build_automorphism(sys, tau, c, u, seed=seed)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_validate_system(args) -> int:
    d = io.parse_float_matrix(_single_matrix_payload(_read_json(args.input)))
    sys = validate_diag_system(d)
    _emit(args, io.encode_system(sys))
    return 0


def _cmd_make_pair(args) -> int:
    mats = io.parse_matrices(_read_json(args.matrices))
    if args.exact:
        if len(mats) != 1 or len(mats[0]) != 2:
            raise InexactInput("the exact factory path needs a single 2x2 matrix")
        _, _, _, pair = from_hyperbolic_exact_2d(mats[0])
    else:
        _, pair = from_hyperbolic(mats)
    _emit(args, io.encode_pair(pair))
    return 0


def _cmd_verify_pair(args) -> int:
    if args.exact:
        raise InexactInput(
            "verify-pair runs the float certification; exact pairs come from make-pair --exact"
        )
    sys = io.parse_system(_read_json(args.system))
    sigma = io.parse_float_matrix(_single_matrix_payload(_read_json(args.sigma)))
    rho = io.parse_float_matrix(_single_matrix_payload(_read_json(args.rho)))
    pair = verify_pair(sys, sigma, rho, tol=args.tol if args.tol is not None else 1e-6)
    _emit(args, io.encode_pair(pair))
    return 0


def _cmd_reduce(args) -> int:
    lat = _load_lattice(args.pair)
    g = io.parse_group_element(_read_json(args.element), lat.sys)
    gamma, r = lat.reduce(g)
    _emit(
        args,
        io.document(
            "decision",
            {
                "question": "reduce",
                "gamma": io.check_document(io.encode_lattice_element(gamma)),
                "remainder": io.check_document(io.encode_group_element(r)),
            },
        ),
    )
    return 0


def _cmd_mul(args) -> int:
    lat = _load_lattice(args.pair)
    a = io.parse_lattice_element(_read_json(args.left))
    b = io.parse_lattice_element(_read_json(args.right))
    _emit(args, io.encode_lattice_element(lat.mul(lat.element(a.v, a.k), lat.element(b.v, b.k))))
    return 0


def _cmd_inv(args) -> int:
    lat = _load_lattice(args.pair)
    a = io.parse_lattice_element(_read_json(args.element))
    _emit(args, io.encode_lattice_element(lat.inv(lat.element(a.v, a.k))))
    return 0


def _cmd_membership(args) -> int:
    lat = _load_lattice(args.pair)
    g = io.parse_group_element(_read_json(args.element), lat.sys)
    e = lat.membership(g, tol=args.tol if args.tol is not None else 1e-9)
    if e is None:
        _emit(args, io.document("decision", {"question": "membership", "member": False}))
    else:
        _emit(args, io.encode_lattice_element(e))
    return 0


def _cmd_automorphisms(args) -> int:
    sys = io.parse_system(_read_json(args.system))
    perms = valid_permutations(sys)
    _emit(
        args,
        io.document(
            "decision",
            {
                "question": "automorphisms",
                "permutations": [[io.encode_int(i) for i in p] for p in perms],
                "deltas": [io.encode_float_matrix(delta_of(sys, p)) for p in perms],
            },
        ),
    )
    return 0


def _cmd_equivalent(args) -> int:
    lat1 = _load_lattice(args.left)
    lat2 = _load_lattice(args.right)
    tol = args.tol if args.tol is not None else 1e-6
    if args.phi:
        phi = parse_automorphism(_read_json(args.phi), lat1.sys, args.seed)
        dec = equivalence_decision(phi, lat1, lat2, tol)
        if args.exact and dec.certification != "exact":
            raise InexactInput("exact equivalence check needs exact pairs and scales")
        witness = encode_automorphism(phi)["payload"] if dec.equivalent else None
    else:
        phi = search_equivalence(lat1, lat2, denom_bound=args.denom_bound)
        dec = equivalence_decision(phi, lat1, lat2, tol) if phi is not None else None
        witness = encode_automorphism(phi)["payload"] if phi is not None else None
    payload = {
        "question": "equivalent",
        "equivalent": bool(dec.equivalent) if dec is not None else False,
        "certification": dec.certification if dec is not None else "exact",
        "witness": witness,
    }
    if dec is not None and dec.fiber_det is not None:
        payload["fiber_det"] = io.encode_int(dec.fiber_det)
        payload["base_det"] = io.encode_int(dec.base_det)
    _emit(args, io.document("decision", payload))
    return 0


def _cmd_commensurable(args) -> int:
    lat1 = _load_lattice(args.left)
    lat2 = _load_lattice(args.right)
    dec = commensurable(
        lat1,
        lat2,
        method=args.method,
        denom_bound=args.denom_bound,
        tol=args.tol if args.tol is not None else 1e-9,
    )
    if args.exact and dec.certification != "exact":
        raise InexactInput("exact commensurability needs exact pairs on both sides")
    payload = {
        "question": "commensurable",
        "method": dec.method,
        "verdict": dec.verdict,
        "certification": {
            "level": dec.certification,
            "denom_bound": io.encode_int(dec.denom_bound) if dec.denom_bound else None,
            "tol": io.encode_float(dec.tol) if dec.tol else None,
        },
        "fiber_witness": (
            io.encode_exact_matrix(dec.fiber_witness) if dec.fiber_witness is not None else None
        ),
        "base_witness": (
            io.encode_exact_matrix(dec.base_witness) if dec.base_witness is not None else None
        ),
    }
    if dec.fiber_rank is not None:
        payload["fiber_rank"] = io.encode_int(dec.fiber_rank)
        payload["base_rank"] = io.encode_int(dec.base_rank)
    _emit(args, io.document("decision", payload))
    return 0


def _cmd_sublattice(args) -> int:
    lat1 = _load_lattice(args.left)
    lat2 = _load_lattice(args.right)
    sub = common_sublattice(
        lat1, lat2, denom_bound=args.denom_bound, tol=args.tol if args.tol is not None else 1e-9
    )
    _emit(
        args,
        io.document(
            "decision",
            {
                "question": "sublattice",
                "fiber_basis": io.encode_exact_matrix(sub.fiber_basis),
                "base_basis": io.encode_exact_matrix(sub.base_basis),
                "fiber_indices": [io.encode_int(x) for x in sub.fiber_indices],
                "base_indices": [io.encode_int(x) for x in sub.base_indices],
                "index1": io.encode_int(sub.index1),
                "index2": io.encode_int(sub.index2),
                "certification": sub.certification,
            },
        ),
    )
    return 0


def _cmd_family3d(args) -> int:
    _emit(args, io.encode_matrices([family_3d(args.k, args.l)]))
    return 0


def _cmd_presentation(args) -> int:
    lat = _load_lattice(args.pair)
    pres = lat.presentation()
    rels = []
    for rel in pres.relations:
        entry = {"kind": rel.kind, "left": rel.left, "right": rel.right}
        if rel.exponents is not None:
            entry["exponents"] = [io.encode_int(x) for x in rel.exponents]
        rels.append(entry)
    _emit(
        args,
        io.document(
            "decision",
            {
                "question": "presentation",
                "fiber_generators": list(pres.fiber_generators),
                "base_generators": list(pres.base_generators),
                "relations": rels,
                "rendered": pres.rendered(),
            },
        ),
    )
    return 0


# ---------------------------------------------------------------------------
# wiring
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="solvlat", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--tol", type=float, default=None, help="tolerance override")
        p.add_argument("--denom-bound", type=int, default=10**6)
        p.add_argument("--exact", action="store_true", help="require the exact path")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--output", default=None)

    p = sub.add_parser("validate-system", help="validate diagonal data")
    p.add_argument("--input", required=True)
    common(p)
    p.set_defaults(func=_cmd_validate_system)

    p = sub.add_parser("make-pair", help="build a pair from hyperbolic matrices")
    p.add_argument("--matrices", required=True)
    common(p)
    p.set_defaults(func=_cmd_make_pair)

    p = sub.add_parser("verify-pair", help="certify (sigma, rho) against a system")
    p.add_argument("--system", required=True)
    p.add_argument("--sigma", required=True)
    p.add_argument("--rho", required=True)
    common(p)
    p.set_defaults(func=_cmd_verify_pair)

    p = sub.add_parser("reduce", help="fundamental-domain reduction of a group element")
    p.add_argument("--pair", required=True)
    p.add_argument("--element", required=True)
    common(p)
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("mul", help="lattice product")
    p.add_argument("--pair", required=True)
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    common(p)
    p.set_defaults(func=_cmd_mul)

    p = sub.add_parser("inv", help="lattice inverse")
    p.add_argument("--pair", required=True)
    p.add_argument("--element", required=True)
    common(p)
    p.set_defaults(func=_cmd_inv)

    p = sub.add_parser("membership", help="test a group element for lattice membership")
    p.add_argument("--pair", required=True)
    p.add_argument("--element", required=True)
    common(p)
    p.set_defaults(func=_cmd_membership)

    p = sub.add_parser("automorphisms", help="valid permutations and base maps")
    p.add_argument("--system", required=True)
    common(p)
    p.set_defaults(func=_cmd_automorphisms)

    p = sub.add_parser("equivalent", help="equivalence by an automorphism")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--phi", default=None)
    common(p)
    p.set_defaults(func=_cmd_equivalent)

    p = sub.add_parser("commensurable", help="commensurability decision")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--method", choices=("rational-test", "rank-test"), default="rational-test")
    common(p)
    p.set_defaults(func=_cmd_commensurable)

    p = sub.add_parser("sublattice", help="common finite-index sublattice")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    common(p)
    p.set_defaults(func=_cmd_sublattice)

    p = sub.add_parser("family3d", help="the 3x3 det-one family A(k, l)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    common(p)
    p.set_defaults(func=_cmd_family3d)

    p = sub.add_parser("presentation", help="generators and relations of the lattice")
    p.add_argument("--pair", required=True)
    common(p)
    p.set_defaults(func=_cmd_presentation)

    return top


def _error_json(exc: SolvlatError) -> str:
    if isinstance(exc, InvalidDiagSystem):
        errors = exc.codes
        details = [
            {"code": v.code, "message": v.message, "details": _stringify(v.details)}
            for v in exc.violations
        ]
    else:
        errors = [exc.code]
        details = _stringify(exc.details)
    return io.dumps(
        {"error": exc.code, "errors": errors, "message": exc.message, "details": details}
    )


def _stringify(obj):
    if isinstance(obj, dict):
        return {k: _stringify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_stringify(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return io.encode_float(float(obj))
    if isinstance(obj, (np.integer, int)):
        return io.encode_int(int(obj))
    if isinstance(obj, (Fraction, Quad)):
        return io.encode_scalar(obj)
    return str(obj) if not isinstance(obj, (str, type(None), bool)) else obj


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ParseError as exc:
        print(_error_json(exc))
        return 2
    except InvalidDiagSystem as exc:
        print(_error_json(exc))
        return 1
    except SolvlatError as exc:
        print(_error_json(exc))
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
