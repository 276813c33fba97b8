"""Reading and writing form description documents.

The interchange format is JSON with exact rationals as strings, schema
version "1".  Indices are 1-based and strictly increasing inside each
multi-index; a flag is given by the coordinate indices spanning the
vertical space plus an optional splitting matrix (columns into the total
space).  See the shipped corpus files for worked examples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import DocumentError
from .exterior import AlternatingForm, Flag, VectorValuedForm, coordinate_flag, form, with_splitting
from .lie import LieAlgebra, lie_algebra
from .linalg import Matrix, Subspace, frac
from .polyforms import PolyForm, poly_from_terms

SCHEMA_VERSION = "1"

KINDS = ("scalar_form", "vector_valued_form", "poly_form", "lie_algebra")


@dataclass
class FormDocument:
    kind: str
    payload: object            # VectorValuedForm | AlternatingForm | PolyForm | LieAlgebra
    flag: Flag | None = None
    r: int | None = None
    frame: Matrix | None = None
    description: str = ""
    claims: dict = field(default_factory=dict)


def _rat(s) -> Fraction:
    try:
        return frac(s)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise DocumentError(f"bad rational {s!r}: {exc}") from exc


def _need(doc: dict, key: str):
    if key not in doc:
        raise DocumentError(f"missing field {key!r}")
    return doc[key]


def parse_document(doc: dict) -> FormDocument:
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise DocumentError(f"unsupported schema_version {doc.get('schema_version')!r}")
    kind = _need(doc, "kind")
    if kind not in KINDS:
        raise DocumentError(f"unknown kind {kind!r}")
    try:
        if kind == "lie_algebra":
            payload = _parse_lie(doc)
        elif kind == "poly_form":
            payload = _parse_poly_form(doc)
        else:
            payload = _parse_alternating(doc, kind)
    except DocumentError:
        raise
    except Exception as exc:  # invariant violations inside constructors
        raise DocumentError(f"invalid document: {exc}") from exc
    flag = None
    if "flag" in doc and doc["flag"] is not None:
        flag = _parse_flag(doc["flag"], doc)
    frame = None
    if "frame" in doc and doc["frame"] is not None:
        frame = Matrix.from_rows([[_rat(x) for x in row] for row in doc["frame"]])
    return FormDocument(kind, payload, flag, doc.get("r"), frame,
                        doc.get("description", ""), doc.get("claims", {}))


def _parse_alternating(doc: dict, kind: str):
    dim = int(_need(doc, "dim"))
    degree = int(_need(doc, "degree"))
    value_dim = int(doc.get("value_dim", 1))
    if kind == "scalar_form" and value_dim != 1:
        raise DocumentError("scalar_form must have value_dim 1")
    buckets: list[dict] = [dict() for _ in range(value_dim)]
    for term in _need(doc, "terms"):
        idx = tuple(int(i) for i in _need(term, "indices"))
        if list(idx) != sorted(set(idx)):
            raise DocumentError(f"indices must be strictly increasing: {idx}")
        if len(idx) != degree:
            raise DocumentError(f"multi-index {idx} does not match degree {degree}")
        comp = int(term.get("component", 1))
        if not 1 <= comp <= value_dim:
            raise DocumentError(f"component {comp} out of range")
        c = _rat(_need(term, "coefficient"))
        buckets[comp - 1][idx] = buckets[comp - 1].get(idx, Fraction(0)) + c
    comps = [form(dim, degree, b) for b in buckets]
    if kind == "scalar_form":
        return comps[0]
    return VectorValuedForm(tuple(comps))


def _parse_poly_form(doc: dict) -> PolyForm:
    dim = int(_need(doc, "dim"))
    degree = int(_need(doc, "degree"))
    split = tuple(int(x) for x in _need(doc, "split"))
    if len(split) != 2:
        raise DocumentError("split must be a pair")
    coeffs: dict = {}
    for term in _need(doc, "terms"):
        idx = tuple(int(i) for i in _need(term, "indices"))
        if list(idx) != sorted(set(idx)):
            raise DocumentError(f"indices must be strictly increasing: {idx}")
        if len(idx) != degree:
            raise DocumentError(f"multi-index {idx} does not match degree {degree}")
        terms = {}
        for mono in _need(term, "polynomial"):
            exps = tuple(int(e) for e in _need(mono, "exponents"))
            if len(exps) != dim:
                raise DocumentError("exponent tuple does not match dimension")
            terms[exps] = _rat(_need(mono, "coefficient"))
        p = poly_from_terms(dim, terms)
        mask = 0
        for i in idx:
            mask |= 1 << (i - 1)
        if not p.is_zero():
            cur = coeffs.get(mask)
            coeffs[mask] = p if cur is None else cur + p
    return PolyForm(dim, degree, split, {m: p for m, p in coeffs.items() if not p.is_zero()})


def _parse_lie(doc: dict) -> LieAlgebra:
    dim = int(_need(doc, "dim"))
    c = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
    for entry in _need(doc, "structure_constants"):
        a, b, k = (int(x) for x in _need(entry, "indices"))
        c[a - 1][b - 1][k - 1] = _rat(_need(entry, "value"))
    return lie_algebra(dim, c)


def _parse_flag(flag_doc: dict, doc: dict) -> Flag:
    dim = int(_need(doc, "dim"))
    vertical = [int(i) for i in _need(flag_doc, "vertical_indices")]
    flag = coordinate_flag(dim, vertical)
    if "splitting" in flag_doc and flag_doc["splitting"] is not None:
        cols = [[_rat(x) for x in col] for col in flag_doc["splitting"]]
        flag = with_splitting(flag, Matrix.from_cols(cols))
    return flag


def load_document(path) -> FormDocument:
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON in {path}: {exc}") from exc
    return parse_document(doc)


# ---------------------------------------------------------------------------
# serialization


def _rat_str(c: Fraction) -> str:
    return str(c)


def alternating_to_document(x, *, flag: Flag | None = None, r: int | None = None,
                            description: str = "", claims: dict | None = None) -> dict:
    if isinstance(x, AlternatingForm):
        kind = "scalar_form"
        comps = [x]
    else:
        kind = "vector_valued_form"
        comps = list(x.components)
    terms = []
    for a, comp in enumerate(comps, start=1):
        for idx, c in comp.terms():
            t = {"indices": list(idx), "coefficient": _rat_str(c)}
            if kind == "vector_valued_form":
                t["component"] = a
            terms.append(t)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "dim": comps[0].dim,
        "degree": comps[0].degree,
        "terms": terms,
    }
    if kind == "vector_valued_form":
        doc["value_dim"] = len(comps)
    if description:
        doc["description"] = description
    if flag is not None:
        doc["flag"] = flag_to_document(flag)
    if r is not None:
        doc["r"] = r
    if claims:
        doc["claims"] = claims
    return doc


def poly_form_to_document(x: PolyForm, *, description: str = "",
                          claims: dict | None = None) -> dict:
    terms = []
    for idx, p in x.terms():
        terms.append({
            "indices": list(idx),
            "polynomial": [{"exponents": list(e), "coefficient": _rat_str(c)}
                           for e, c in sorted(p.terms.items())],
        })
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "poly_form",
        "dim": x.dim,
        "degree": x.degree,
        "split": list(x.split),
        "terms": terms,
    }
    if description:
        doc["description"] = description
    if claims:
        doc["claims"] = claims
    return doc


def flag_to_document(flag: Flag) -> dict:
    vertical = [p + 1 for p in flag.vertical.pivot_columns()]
    cols = [[_rat_str(x) for x in flag.splitting.col(j)] for j in range(flag.dim_t)]
    return {"vertical_indices": vertical, "splitting": cols}


def subspace_to_rows(sub: Subspace) -> list[list[str]]:
    return [[_rat_str(x) for x in row] for row in sub.vectors()]


def matrix_to_rows(m: Matrix) -> list[list[str]]:
    return [[_rat_str(x) for x in m.row(i)] for i in range(m.rows)]
