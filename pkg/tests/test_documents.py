import json
from dataclasses import replace

import pytest

from pseudocharacters.conjugacy import build_rho_2n
from pseudocharacters.documents import (
    DocumentError,
    cayley_doc,
    cyclic_doc,
    document_kind,
    group_from_doc,
    product_doc,
    pseudochar_from_doc,
    pseudochar_to_doc,
    representation_from_doc,
    representation_to_doc,
)
from pseudocharacters.groups import build_cyclic, direct_product
from pseudocharacters.representations import trace_function

Z4xZ4 = product_doc(cyclic_doc(4), cyclic_doc(4))


def _through_json(doc):
    return json.loads(json.dumps(doc))


def test_group_documents():
    assert group_from_doc(cyclic_doc(4)) == build_cyclic(4)
    assert group_from_doc(Z4xZ4) == direct_product(build_cyclic(4), build_cyclic(4))
    g = group_from_doc(Z4xZ4)
    assert group_from_doc(_through_json(cayley_doc(g))) == g


@pytest.mark.parametrize(
    "doc",
    [
        {"kind": "cyclic"},
        {"kind": "cyclic", "m": "4"},
        {"kind": "cyclic", "m": 0},
        {"kind": "product", "factors": []},
        {"kind": "cayley", "table": [[0, 1], [1, 1]]},
        {"kind": "lie"},
    ],
)
def test_bad_group_documents(doc):
    with pytest.raises(ValueError):
        group_from_doc(doc)


def test_representation_round_trip(rho6):
    doc = _through_json(representation_to_doc(rho6, Z4xZ4))
    assert document_kind(doc) == "representation"
    assert doc["generators"][0] == {"element": 4, "matrix": [["0", "1", "0", "0", "0", "0"], ["-1", "0", "0", "0", "0", "0"], ["0", "0", "0", "1", "0", "0"], ["0", "0", "-1", "0", "0", "0"], ["0", "0", "0", "0", "1", "0"], ["0", "0", "0", "0", "0", "1"]]}
    back = representation_from_doc(doc)
    assert back == rho6
    assert back.generators == rho6.generators


def test_representation_closure_without_group():
    doc = {"generators": [{"matrix": [["0", "1"], ["-1", "0"]]}]}
    rep = representation_from_doc(doc)
    assert rep.group.order == 4


def test_bad_rational_in_matrix(rho6):
    doc = _through_json(representation_to_doc(rho6, Z4xZ4))
    doc["generators"][0]["matrix"][0][0] = "1/0"
    with pytest.raises(DocumentError, match="1/0"):
        representation_from_doc(doc)


def test_generator_outside_group(rho6):
    doc = _through_json(representation_to_doc(rho6, Z4xZ4))
    doc["generators"][0]["element"] = 16
    with pytest.raises(DocumentError):
        representation_from_doc(doc)


def test_pseudochar_round_trip(rho6):
    d = trace_function(rho6, "SO")
    d = replace(d, P={(4, 1, 1): 16, (0, 0, 0): 0})
    doc = _through_json(pseudochar_to_doc(d, Z4xZ4, representation_to_doc(rho6, Z4xZ4)))
    back = pseudochar_from_doc(doc)
    assert back.T == d.T and back.l == d.l and back.P == d.P and back.dim == 6
    assert back.model == rho6
    assert document_kind(doc) == "pseudocharacter"


def test_pseudochar_document_errors():
    base = {"group": cyclic_doc(2), "dim": 1, "T": ["1", "-1"]}
    assert pseudochar_from_doc(base).T == (1, -1)
    for bad in (
        dict(base, T=["1"]),
        dict(base, T=["1", "1/0"]),
        dict(base, dim=0),
        dict(base, l=["1"]),
        dict(base, dim=2, P={"arity": 2, "entries": []}),
        dict(base, dim=2, P={"arity": 1, "entries": [{"tuple": [0, 1], "value": "1"}]}),
    ):
        with pytest.raises(ValueError):
            pseudochar_from_doc(bad)


def test_document_kind_needs_an_object():
    with pytest.raises(DocumentError):
        document_kind([1, 2])
    with pytest.raises(DocumentError):
        document_kind({"x": 1})
