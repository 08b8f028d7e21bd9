"""JSON document model shared by the CLI.

Every number is serialized as a string: plain decimal for binary64 values,
"p/q" for rationals, and {"a": "p/q", "b": "p/q", "d": k} records for
quadratic irrationals, so exact payloads survive a round trip bit for bit.
Matrices are {"rows", "cols", "entries"} with a flat row-major entry list.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Optional, Sequence, Union

import numpy as np

from .errors import ParseError
from .exactmat import ExactMatrix
from .group import DiagSystem, GroupElement, validate_diag_system
from .lattice import CompatiblePair, Lattice, LatticeElement
from .scalars import Quad

FORMAT_VERSION = "1"

KINDS = (
    "system",
    "pair",
    "lattice-element",
    "group-element",
    "automorphism",
    "decision",
    "matrix",
)


# ---------------------------------------------------------------------------
# scalar and matrix codecs
# ---------------------------------------------------------------------------

def encode_float(x: float) -> str:
    return repr(float(x))


def encode_int(x: int) -> str:
    return str(int(x))


def encode_fraction(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def encode_scalar(x: Union[int, float, Fraction, Quad]) -> Union[str, dict]:
    if isinstance(x, Quad):
        if x.b == 0:
            return encode_fraction(x.a)
        return {"a": encode_fraction(x.a), "b": encode_fraction(x.b), "d": x.d}
    if isinstance(x, bool):
        raise ParseError("booleans are not scalars")
    if isinstance(x, int):
        return encode_int(x)
    if isinstance(x, Fraction):
        return encode_fraction(x)
    return encode_float(x)


def parse_exact_scalar(s: Union[str, dict]) -> Union[Fraction, Quad]:
    if isinstance(s, dict):
        try:
            return Quad(parse_fraction(s["a"]), parse_fraction(s["b"]), int(s["d"]))
        except (KeyError, ValueError) as exc:
            raise ParseError(f"bad quadratic record {s!r}: {exc}")
    return parse_fraction(s)


def parse_fraction(s: str) -> Fraction:
    if not isinstance(s, str):
        raise ParseError(f"expected a number string, got {type(s).__name__}")
    try:
        if "/" in s:
            num, den = s.split("/")
            return Fraction(int(num), int(den))
        return Fraction(int(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {s!r}: {exc}")


def parse_float(s: Union[str, int, float]) -> float:
    if isinstance(s, (int, float)) and not isinstance(s, bool):
        return float(s)
    try:
        return float(s)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad float {s!r}: {exc}")


def encode_float_matrix(m: Union[np.ndarray, Sequence[Sequence[float]]]) -> dict:
    a = np.asarray(m, dtype=float)
    return {
        "rows": a.shape[0],
        "cols": a.shape[1],
        "entries": [encode_float(x) for x in a.ravel()],
    }


def parse_float_matrix(doc: dict) -> np.ndarray:
    rows, cols, entries = _matrix_fields(doc)
    return np.array([parse_float(x) for x in entries], dtype=float).reshape(rows, cols)


def encode_int_matrix(m: Sequence[Sequence[int]]) -> dict:
    return {
        "rows": len(m),
        "cols": len(m[0]),
        "entries": [encode_int(x) for r in m for x in r],
    }


def parse_int_matrix(doc: dict) -> list[list[int]]:
    rows, cols, entries = _matrix_fields(doc)
    vals = []
    for x in entries:
        f = parse_fraction(x)
        if f.denominator != 1:
            raise ParseError(f"expected integer entry, got {x!r}")
        vals.append(f.numerator)
    return [vals[i * cols : (i + 1) * cols] for i in range(rows)]


def encode_exact_matrix(m: ExactMatrix) -> dict:
    return {
        "rows": m.rows,
        "cols": m.cols,
        "entries": [encode_scalar(m[i, j]) for i in range(m.rows) for j in range(m.cols)],
    }


def parse_exact_matrix(doc: dict) -> ExactMatrix:
    rows, cols, entries = _matrix_fields(doc)
    vals = [parse_exact_scalar(x) for x in entries]
    return ExactMatrix([vals[i * cols : (i + 1) * cols] for i in range(rows)])


def _matrix_fields(doc: dict) -> tuple[int, int, list]:
    try:
        rows = int(doc["rows"])
        cols = int(doc["cols"])
        entries = doc["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad matrix record: {exc}")
    if not isinstance(entries, list) or len(entries) != rows * cols or rows < 1 or cols < 1:
        raise ParseError("matrix entry count does not match rows*cols")
    return rows, cols, entries


# ---------------------------------------------------------------------------
# documents
# ---------------------------------------------------------------------------

def document(kind: str, payload: dict) -> dict:
    if kind not in KINDS:
        raise ParseError(f"unknown document kind {kind!r}")
    return {"version": FORMAT_VERSION, "kind": kind, "payload": payload}


def check_document(doc: Any, kind: Optional[str] = None) -> dict:
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object")
    if doc.get("version") != FORMAT_VERSION:
        raise ParseError(f"unsupported format version {doc.get('version')!r}")
    if doc.get("kind") not in KINDS:
        raise ParseError(f"unknown document kind {doc.get('kind')!r}")
    if kind is not None and doc["kind"] != kind:
        raise ParseError(f"expected a {kind} document, got {doc['kind']}")
    payload = doc.get("payload")
    if not isinstance(payload, dict):
        raise ParseError("missing payload")
    return payload


def encode_system(sys: DiagSystem) -> dict:
    return document(
        "system",
        {
            "n": sys.n,
            "m": sys.m,
            "d": encode_float_matrix(sys.d),
            "precision": sys.precision,
        },
    )


def parse_system(doc: dict) -> DiagSystem:
    payload = check_document(doc, "system")
    try:
        d = parse_float_matrix(payload["d"])
        precision = payload.get("precision", "double")
    except KeyError as exc:
        raise ParseError(f"system payload missing {exc}")
    return validate_diag_system(d, precision=precision)


def encode_pair(pair: CompatiblePair) -> dict:
    exact = None
    if pair.is_exact:
        exact = {
            "sigma": encode_exact_matrix(pair.sigma_exact),
            "rho": encode_exact_matrix(pair.rho_exact),
            "eta": [encode_exact_matrix(e) for e in pair.eta_exact],
        }
    return document(
        "pair",
        {
            "system": check_document(encode_system(pair.sys), "system"),
            "sigma": encode_float_matrix(pair.sigma),
            "rho": encode_float_matrix(pair.rho),
            "holonomy": [encode_int_matrix(a) for a in pair.holonomy_list()],
            "residual": encode_float(pair.residual),
            "exact": exact,
        },
    )


def parse_pair(doc: dict) -> CompatiblePair:
    payload = check_document(doc, "pair")
    try:
        sys = parse_system(document("system", payload["system"]))
        sigma = parse_float_matrix(payload["sigma"])
        rho = parse_float_matrix(payload["rho"])
        holonomy = tuple(
            tuple(tuple(r) for r in parse_int_matrix(h)) for h in payload["holonomy"]
        )
        residual = parse_float(payload["residual"])
        exact = payload.get("exact")
    except KeyError as exc:
        raise ParseError(f"pair payload missing {exc}")
    sigma_exact = rho_exact = eta_exact = None
    if exact is not None:
        try:
            sigma_exact = parse_exact_matrix(exact["sigma"])
            rho_exact = parse_exact_matrix(exact["rho"])
            eta_exact = tuple(parse_exact_matrix(e) for e in exact["eta"])
        except KeyError as exc:
            raise ParseError(f"exact pair payload missing {exc}")
    return CompatiblePair(
        sys=sys,
        sigma=sigma,
        rho=rho,
        holonomy=holonomy,
        residual=residual,
        sigma_exact=sigma_exact,
        rho_exact=rho_exact,
        eta_exact=eta_exact,
    )


def encode_lattice_element(e: LatticeElement) -> dict:
    return document(
        "lattice-element",
        {"v": [encode_int(x) for x in e.v], "k": [encode_int(x) for x in e.k]},
    )


def parse_lattice_element(doc: dict) -> LatticeElement:
    payload = check_document(doc, "lattice-element")
    try:
        v = [int(parse_fraction(x)) for x in payload["v"]]
        k = [int(parse_fraction(x)) for x in payload["k"]]
    except KeyError as exc:
        raise ParseError(f"lattice element missing {exc}")
    return LatticeElement.of(v, k)


def encode_group_element(g: GroupElement) -> dict:
    return document(
        "group-element",
        {
            "x": [encode_float(x) for x in g.x],
            "t": [encode_float(x) for x in g.t],
        },
    )


def parse_group_element(doc: dict, sys: DiagSystem) -> GroupElement:
    payload = check_document(doc, "group-element")
    try:
        x = [parse_float(v) for v in payload["x"]]
        t = [parse_float(v) for v in payload["t"]]
    except KeyError as exc:
        raise ParseError(f"group element missing {exc}")
    return sys.element(x, t)


def encode_matrices(mats: Sequence[Sequence[Sequence[int]]]) -> dict:
    return document("matrix", {"matrices": [encode_int_matrix(m) for m in mats]})


def parse_matrices(doc: dict) -> list[list[list[int]]]:
    payload = check_document(doc, "matrix")
    try:
        return [parse_int_matrix(m) for m in payload["matrices"]]
    except KeyError as exc:
        raise ParseError(f"matrix document missing {exc}")


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)


def loads(text: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}")
