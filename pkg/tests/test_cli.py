import json

import pytest

from pseudocharacters.cli import main
from pseudocharacters.conjugacy import rho_prime
from pseudocharacters.documents import (
    cyclic_doc,
    dump_json,
    product_doc,
    pseudochar_to_doc,
    representation_to_doc,
)
from pseudocharacters.representations import Representation, trace_function, trivial_rep

Z4xZ4 = product_doc(cyclic_doc(4), cyclic_doc(4))


@pytest.fixture
def files(tmp_path, rho6):
    paths = {}
    for name, rep in (("rho6", rho6), ("prime", rho_prime(rho6))):
        paths[name] = tmp_path / f"{name}.json"
        dump_json(representation_to_doc(rep, Z4xZ4), paths[name])
    triv = trivial_rep(rho6.group, 6)
    triv = Representation(triv.group, triv.images, (4, 1))
    paths["trivial"] = tmp_path / "trivial.json"
    dump_json(representation_to_doc(triv, Z4xZ4), paths["trivial"])
    paths["tr"] = tmp_path / "tr.json"
    dump_json(pseudochar_to_doc(trace_function(rho6, "GL"), Z4xZ4), paths["tr"])
    return paths


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_emit_gl_n1(capsys):
    code, out, _ = run(capsys, "emit-relations", "--family", "gl", "--n", 1)
    assert code == 0
    assert out == "U[A1]·U[A2] − U[A1 A2]\n"


def _terms(text):
    body = text.strip().replace("−", "+-").split(" + ")
    return sorted(t.strip() for t in body)


def test_emit_o_j0_matches_gl(capsys):
    _, o_text, _ = run(capsys, "emit-relations", "--family", "o", "--n", 2, "--j", 0)
    _, gl_text, _ = run(capsys, "emit-relations", "--family", "gl", "--n", 2)
    assert _terms(o_text.replace("T[", "U[")) == _terms(gl_text)


def test_emit_go_has_similitude_symbols(capsys):
    code, out, _ = run(capsys, "emit-relations", "--family", "go", "--n", 2, "--j", 1)
    assert code == 0 and "l[" in out


def test_emit_all_j(capsys):
    _, out, _ = run(capsys, "emit-relations", "--family", "o", "--n", 3)
    assert [line.split("]")[0] for line in out.splitlines()] == ["[j=0", "[j=1", "[j=2"]


def test_emit_budget(capsys):
    code, _, err = run(capsys, "emit-relations", "--family", "gl", "--n", 9)
    assert code == 2 and "budget" in err


def test_emit_is_stable(capsys):
    first = run(capsys, "emit-relations", "--family", "go", "--n", 3, "--j", 1)[1]
    assert run(capsys, "emit-relations", "--family", "go", "--n", 3, "--j", 1)[1] == first


def test_verify_rho6_as_o(capsys, files):
    code, out, _ = run(capsys, "verify", files["rho6"], "--family", "o")
    assert code == 0 and "verdict: pass" in out


def test_verify_as_gl5_fails(capsys, files):
    code, out, _ = run(capsys, "verify", files["tr"], "--family", "gl", "--n", 5, "--json")
    assert code == 1
    report = json.loads(out)
    assert report["violations"][0]["axiom"] == "T(1)=n"


def test_verify_malformed_rational(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"group": cyclic_doc(2), "dim": 1, "T": ["1", "1/0"]}))
    code, _, err = run(capsys, "verify", bad, "--family", "gl")
    assert code == 2 and "1/0" in err


def test_verify_missing_file_and_bad_json(capsys, tmp_path):
    assert run(capsys, "verify", tmp_path / "nope.json", "--family", "gl")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "verify", bad, "--family", "gl")[0] == 2


def test_verify_reports_are_byte_identical(capsys, files):
    a = run(capsys, "verify", files["rho6"], "--family", "o", "--seed", 5, "--json")[1]
    b = run(capsys, "verify", files["rho6"], "--family", "o", "--seed", 5, "--json")[1]
    assert a == b


def test_conjugacy_exit_codes(capsys, files):
    code, out, _ = run(capsys, "conjugacy-compare", files["rho6"], files["prime"], "--family", "so")
    assert code == 3 and "pl" in out and "16 vs -16" in out
    assert run(capsys, "conjugacy-compare", files["rho6"], files["prime"], "--family", "o")[0] == 0
    assert run(capsys, "conjugacy-compare", files["rho6"], files["trivial"], "--family", "o")[0] == 1


def test_conjugacy_json(capsys, files):
    code, out, _ = run(capsys, "conjugacy-compare", files["rho6"], files["prime"], "--family", "so", "--json")
    assert json.loads(out)["outcome"] == "element-conjugate-only"


def test_counterexample_writes_documents(capsys, tmp_path):
    code, out, _ = run(capsys, "so-counterexample", "--n", 3, "--out", tmp_path)
    assert code == 0 and "pl = 16" in out
    report = json.loads((tmp_path / "rho_6_criterion.json").read_text())
    assert report["value"] == "16" and report["value_block_oracle"] == "16"
    assert report["witness"] == ["(1,0)", "(0,1)", "(0,1)"]
    # the written representation is re-readable
    code, _, _ = run(capsys, "verify", tmp_path / "rho_6.json", "--family", "gl")
    assert code == 0


def test_counterexample_n4(capsys, tmp_path):
    code, out, _ = run(capsys, "so-counterexample", "--n", 4, "--out", tmp_path, "--json")
    assert code == 0 and json.loads(out)["value"] == "96"


def test_counterexample_rejects_small_n(capsys, tmp_path):
    assert run(capsys, "so-counterexample", "--n", 2, "--out", tmp_path)[0] == 2


def test_usage_errors(capsys):
    assert run(capsys, "verify")[0] == 2
    assert run(capsys, "emit-relations", "--family", "xx", "--n", 1)[0] == 2
    assert run(capsys, "emit-relations", "--family", "so", "--n", 1)[0] == 2
