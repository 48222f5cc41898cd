"""JSON documents for groups, representations and pseudocharacter data.

Rationals travel as strings (``"p/q"`` or ``"p"``); matrices as row-major
lists of such strings.  Documents are plain dicts so they round-trip through
``json`` unchanged.

Group::

    {"kind": "cyclic", "m": 4}
    {"kind": "product", "factors": [group, ...]}
    {"kind": "cayley", "table": [[...], ...], "labels": [...]}

Representation::

    {"group": group, "generators": [{"element": 4, "matrix": [["0", "1"], ["-1", "0"]]}, ...]}

A representation without ``"group"`` is closed under multiplication from
its generator matrices.  Pseudocharacter::

    {"group": group, "dim": 6, "T": ["6", "2", ...], "l": [...],
     "P": {"arity": 3, "entries": [{"tuple": [4, 1, 1], "value": "16"}]},
     "model": representation}
"""

from __future__ import annotations

import json
from functools import reduce
from pathlib import Path
from typing import Any

from .groups import FiniteGroup, MalformedGroupError, build_cyclic, direct_product, from_cayley_table, generator_words
from .linalg import Matrix, format_rational, parse_rational
from .pseudochar import PseudocharData
from .representations import DEFAULT_MAX_ORDER, Representation, from_generator_assignment, from_matrix_generators


class DocumentError(ValueError):
    pass


def _require(doc: dict, key: str, where: str):
    if not isinstance(doc, dict) or key not in doc:
        raise DocumentError(f"{where}: missing field {key!r}")
    return doc[key]


def load_json(path: str | Path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: invalid JSON ({exc})") from None


def dump_json(doc: Any, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def document_kind(doc: dict) -> str:
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    if doc.get("document") in ("group", "representation", "pseudocharacter"):
        return doc["document"]
    if "T" in doc:
        return "pseudocharacter"
    if "generators" in doc:
        return "representation"
    if "kind" in doc:
        return "group"
    raise DocumentError("cannot tell what kind of document this is")


# -- groups ----------------------------------------------------------------

def group_from_doc(doc: dict) -> FiniteGroup:
    kind = _require(doc, "kind", "group")
    try:
        if kind == "cyclic":
            m = _require(doc, "m", "cyclic group")
            if not isinstance(m, int) or isinstance(m, bool):
                raise DocumentError(f"cyclic group order must be an integer, got {m!r}")
            return build_cyclic(m)
        if kind == "product":
            factors = _require(doc, "factors", "product group")
            if not isinstance(factors, list) or not factors:
                raise DocumentError("product group needs a nonempty factor list")
            return reduce(direct_product, (group_from_doc(f) for f in factors))
        if kind == "cayley":
            table = _require(doc, "table", "cayley group")
            return from_cayley_table(table, doc.get("labels"))
    except (MalformedGroupError, TypeError) as exc:
        raise DocumentError(f"group: {exc}") from None
    raise DocumentError(f"unknown group kind {kind!r}")


def cyclic_doc(m: int) -> dict:
    return {"kind": "cyclic", "m": m}


def product_doc(*factors: dict) -> dict:
    return {"kind": "product", "factors": list(factors)}


def cayley_doc(grp: FiniteGroup) -> dict:
    doc = {"kind": "cayley", "table": [list(row) for row in grp.mult]}
    if grp.labels is not None:
        doc["labels"] = list(grp.labels)
    return doc


def _element(grp: FiniteGroup, x) -> int:
    if isinstance(x, bool):
        raise DocumentError(f"bad element {x!r}")
    if isinstance(x, int):
        if not 0 <= x < grp.order:
            raise DocumentError(f"element {x} outside a group of order {grp.order}")
        return x
    if isinstance(x, str) and grp.labels is not None and x in grp.labels:
        return grp.labels.index(x)
    raise DocumentError(f"unknown element {x!r}")


# -- rationals and matrices ------------------------------------------------------

def _rational(x, where: str):
    try:
        return parse_rational(x)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise DocumentError(f"{where}: bad rational {x!r} ({exc})") from None


def matrix_from_doc(rows, where: str = "matrix") -> Matrix:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise DocumentError(f"{where}: expected a nonempty list of rows")
    return Matrix([[_rational(x, where) for x in r] for r in rows])


def matrix_to_doc(m: Matrix) -> list[list[str]]:
    return [[format_rational(x) for x in row] for row in m.tolist()]


# -- representations -------------------------------------------------------------

def representation_from_doc(doc: dict, max_order: int = DEFAULT_MAX_ORDER) -> Representation:
    gens = _require(doc, "generators", "representation")
    if not isinstance(gens, list) or not gens:
        raise DocumentError("representation needs a nonempty generator list")
    mats = [matrix_from_doc(_require(g, "matrix", "generator"), f"generator {k}") for k, g in enumerate(gens)]
    if "group" not in doc:
        return from_matrix_generators(mats, max_order=max_order)
    grp = group_from_doc(doc["group"])
    elems = [_element(grp, _require(g, "element", "generator")) for g in gens]
    try:
        words = generator_words(grp, elems)
    except ValueError as exc:
        raise DocumentError(str(exc)) from None
    return from_generator_assignment(grp, elems, mats, words)


def representation_to_doc(rep: Representation, group_doc: dict | None = None) -> dict:
    if rep.generators is None:
        raise ValueError("representation has no recorded generators")
    doc = {
        "document": "representation",
        "generators": [{"element": g, "matrix": matrix_to_doc(rep.images[g])} for g in rep.generators],
    }
    doc["group"] = group_doc if group_doc is not None else cayley_doc(rep.group)
    return doc


# -- pseudocharacters ---------------------------------------------------------------

def pseudochar_from_doc(doc: dict, max_order: int = DEFAULT_MAX_ORDER) -> PseudocharData:
    grp_doc = _require(doc, "group", "pseudocharacter")
    grp = group_from_doc(grp_doc)
    dim = _require(doc, "dim", "pseudocharacter")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise DocumentError(f"dim must be a positive integer, got {dim!r}")
    T = _require(doc, "T", "pseudocharacter")
    if not isinstance(T, list) or len(T) != grp.order:
        raise DocumentError(f"T must list {grp.order} values")
    T = [_rational(x, "T") for x in T]
    lam = doc.get("l")
    if lam is not None:
        if not isinstance(lam, list) or len(lam) != grp.order:
            raise DocumentError(f"l must list {grp.order} values")
        lam = [_rational(x, "l") for x in lam]
    P = None
    if doc.get("P") is not None:
        pdoc = doc["P"]
        arity = _require(pdoc, "arity", "P")
        entries = _require(pdoc, "entries", "P")
        P = {}
        for e in entries:
            tup = tuple(_element(grp, x) for x in _require(e, "tuple", "P entry"))
            if len(tup) != arity:
                raise DocumentError(f"P entry {list(tup)} does not have arity {arity}")
            P[tup] = _rational(_require(e, "value", "P entry"), "P")
        if arity != dim // 2 or dim % 2:
            raise DocumentError(f"P arity must be dim/2 = {dim / 2}, got {arity}")
    model = None
    if doc.get("model") is not None:
        model = representation_from_doc(doc["model"], max_order)
        if model.group != grp:
            raise DocumentError("model representation is over a different group")
    return PseudocharData(grp, dim, tuple(T), tuple(lam) if lam is not None else None, P, model)


def pseudochar_to_doc(d: PseudocharData, group_doc: dict | None = None, model_doc: dict | None = None) -> dict:
    doc = {
        "document": "pseudocharacter",
        "group": group_doc if group_doc is not None else cayley_doc(d.group),
        "dim": d.dim,
        "T": [format_rational(x) for x in d.T],
    }
    if d.l is not None:
        doc["l"] = [format_rational(x) for x in d.l]
    if d.P is not None:
        if callable(d.P):
            raise ValueError("cannot serialise a callable P")
        doc["P"] = {
            "arity": d.dim // 2,
            "entries": [{"tuple": list(k), "value": format_rational(v)} for k, v in sorted(d.P.items())],
        }
    if model_doc is not None:
        doc["model"] = model_doc
    return doc
