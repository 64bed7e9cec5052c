import json
import shutil
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

from scaledquat import cli
from scaledquat.core import AlgebraContext
from scaledquat.errors import ParseError
from scaledquat.io import (NodeDocument, format_matrix_document, format_node_document, load_node,
                           parse_matrix_document, parse_node_document)
from scaledquat.matrix import HtMatrix
from scaledquat.realization import Node, evaluate
from scaledquat.structured import Kind

FIX = Path(__file__).resolve().parents[1] / "fixtures"


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


# documents ---------------------------------------------------------------------

def test_parse_minimal_document():
    doc = parse_node_document('{"t": -1, "a": [], "b": [], "c": [], "d": [[[1, 0, 0, 0]]]}')
    assert doc.node.N == 0 and doc.node.D.is_close(HtMatrix.eye(1, doc.ctx), 0)
    assert doc.kind is None and doc.H is None


def test_fixture_round_trip_is_exact():
    for path in FIX.glob("*.json"):
        text = path.read_text()
        if '"matrix"' in text:
            assert format_matrix_document(parse_matrix_document(text),
                                          json.loads(text).get("metadata")) == text
        else:
            assert format_node_document(parse_node_document(text)) == text


@pytest.mark.parametrize("text,fragment,line", [
    ('{"t": -1, "a": [], "b": [], "c": [], "d": [[[1, 0, 0]]]}', "quadruple", 1),
    ('{"t": 0, "a": [], "b": [], "c": [], "d": [[[1, 0, 0, 0]]]}', "nonzero", 1),
    ('{"t": -1, "a": [], "b": [], "c": []}', "missing key 'd'", 1),
    ('{"t": -1,\n "a": [], "b": [], "c": [],\n "d": [[[1, 0, 0, 0]]],\n "x": 1}', "unknown key", 1),
    ('{"t": -1,\n "a": [], "b": [], "c": [],\n "d": [[[1, 0, 0, "z"]]]}', "", 3),
    ('{"t": -1, "a": [[[1,0,0,0]]], "b": [], "c": [], "d": [[[1, 0, 0, 0]]]}', "", 1),
    ('{"t": -1 "a": []}', "expected", 1),
])
def test_parse_errors(text, fragment, line):
    with pytest.raises(ParseError) as info:
        parse_node_document(text)
    assert fragment in str(info.value)
    assert info.value.line == line and info.value.column >= 1


def test_parse_error_position_of_bad_quadruple():
    text = '{\n  "t": -1,\n  "a": [],\n  "b": [],\n  "c": [],\n  "d": [[[1, 0, 0]]]\n}'
    with pytest.raises(ParseError) as info:
        parse_node_document(text)
    assert info.value.line == 6


exact = st.floats(-1e6, 1e6, allow_nan=False).map(lambda v: float("%.12g" % v))


@given(st.lists(exact, min_size=8, max_size=8), st.sampled_from([-1.0, 0.5, 2.25]))
def test_document_round_trip(vals, t):
    ctx = AlgebraContext(t)
    X = np.array(vals).reshape(1, 2, 4)
    D = HtMatrix.from_quads(X, ctx)
    node = Node(HtMatrix.zeros(0, 0, ctx), HtMatrix.zeros(0, 2, ctx), HtMatrix.zeros(1, 0, ctx), D)
    text = format_node_document(NodeDocument(t, node, metadata={"k": "v"}))
    back = parse_node_document(text)
    assert np.array_equal(back.node.D.quads(), D.quads() + 0.0)
    assert format_node_document(back) == text


# cli ---------------------------------------------------------------------------

def test_eval_blaschke(capsys):
    code, out, _ = run(["--json", "eval", FIX / "blaschke_line.json", 0, 0.25], capsys)
    assert code == 0
    pts = json.loads(out)["points"]
    assert pts[0]["value"] == [[[1.0, 0.0, 0.0, 0.0]]]
    assert pts[1]["value"][0][0][0] == pytest.approx(3.0)


def test_eval_pole(capsys):
    code, out, _ = run(["eval", FIX / "blaschke_line.json", 0.5], capsys)
    assert code == 9 and "pole" in out


def test_verify_fixture(capsys):
    code, out, _ = run(["verify", FIX / "brune.json", "--kind", "line-junitary"], capsys)
    assert code == 0 and "VERIFIED" in out


def test_verify_perturbed(tmp_path, capsys):
    doc = load_node(FIX / "brune.json")
    n = doc.node
    doc.node = Node(n.A, n.B + HtMatrix.real([[1e-3, 0]], doc.ctx), n.C, n.D)
    p = tmp_path / "bad.json"
    p.write_text(format_node_document(doc))
    code, out, _ = run(["--json", "verify", p, "--kind", "line-junitary"], capsys)
    rep = json.loads(out)
    assert code == 1 and not rep["passed"]
    assert max(v for _, v in rep["residuals"]) >= 1e-4


def test_verify_kind_mismatch(capsys):
    code, _, err = run(["verify", FIX / "blaschke_line.json", "--kind", "circle-junitary"], capsys)
    assert code == 6 and "KindMismatch" in err


def test_verify_solves_missing_H(tmp_path, capsys):
    p = tmp_path / "u.json"
    shutil.copy(FIX / "blaschke_circle_uncertified.json", p)
    code, _, _ = run(["verify", p, "--kind", "circle-junitary"], capsys)
    assert code == 0 and load_node(p).H is None
    code, _, _ = run(["verify", p, "--kind", "circle-junitary", "--solve-h"], capsys)
    doc = load_node(p)
    assert code == 0 and doc.H is not None and doc.kind is Kind.CIRCLE_JUNITARY


def test_solve_h_wrong_class(capsys):
    code, _, err = run(["solve-h", FIX / "blaschke_circle_uncertified.json", "--kind", "line-junitary"], capsys)
    assert code == 5 and "NotInClass" in err


def test_tolerance_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("HT_TOL", "1e-30")
    code, out, _ = run(["verify", FIX / "theta.json", "--kind", "circle-junitary"], capsys)
    assert code == 1 and "tol 1e-30" in out
    code, _, _ = run(["--tol", "1e-6", "verify", FIX / "theta.json", "--kind", "circle-junitary"], capsys)
    assert code == 0


def test_factor_product_of_blaschkes(tmp_path, capsys):
    sub = tmp_path / "e1.json"
    sub.write_text('{"t": -1, "matrix": [[[1, 0, 0, 0]], [[0, 0, 0, 0]]]}')
    prefix = tmp_path / "f"
    code, out, _ = run(["--json", "factor", FIX / "blaschke_product.json", "--kind", "line",
                        "--subspace", sub, "--out", prefix], capsys)
    info = json.loads(out)
    assert code == 0 and info["degrees"] == [1, 1] and info["total"] == 2
    R = load_node(FIX / "blaschke_product.json").node
    R1, R2 = (load_node(f).node for f in info["files"])
    for x in (0.1, -0.2):
        assert (evaluate(R1, x) @ evaluate(R2, x)).is_close(evaluate(R, x), 1e-9)
    for f in info["files"]:
        code, _, _ = run(["verify", f, "--kind", "line-junitary"], capsys)
        assert code == 0


def test_factor_degenerate_pair(tmp_path, capsys):
    code, _, err = run(["factor", FIX / "blaschke_pair.json", "--kind", "line", "--from-eigenpair",
                        "--out", tmp_path / "p"], capsys)
    assert code == 7 and "DegenerateSubspace" in err


def test_factor_trivial_subspace(tmp_path, capsys):
    code, out, _ = run(["--json", "factor", FIX / "brune.json", "--kind", "line", "--subspace", "full",
                        "--out", tmp_path / "t"], capsys)
    info = json.loads(out)
    assert code == 0 and info["degrees"] == [1, 0]
    assert load_node(info["files"][1]).node.N == 0


def test_decompose_and_degenerate(tmp_path, capsys):
    code, out, _ = run(["decompose", FIX / "double_x.json", "--kind", "line", "--subspace", "zero",
                        "--out", tmp_path / "d"], capsys)
    assert code == 0 and "=" in out
    code, _, _ = run(["decompose", FIX / "line_antisym.json", "--kind", "line", "--from-eigenpair",
                      "--out", tmp_path / "d"], capsys)
    assert code == 7
    code, _, _ = run(["decompose", FIX / "line_antisym.json", "--kind", "circle", "--subspace", "zero",
                      "--out", tmp_path / "d"], capsys)
    assert code == 6


def test_make_commands(tmp_path, capsys):
    cases = [
        (["blaschke-line", "--alpha", 2, 0, 0, 0], "line-junitary"),
        (["blaschke-circle", "--t", 0.5, "--alpha", 0.3, 0.2, -0.25, 0.1], "circle-junitary"),
        (["blaschke-pair", "--alpha", 0.5, 0.3, 0.2, -0.1, "--beta", 0.7, -0.2, 0.1, 0.4], "line-junitary"),
        (["brune", "--alpha", 0, 0, 1, 0, "--beta", 1, 0, 0, 0, "--gamma", 1, 0, 0, 0, "--h", 1], "line-junitary"),
        (["theta", "--alpha", 0.3, 0.1, 0, 0.2, "--alpha", -0.2, 0.1, 0.3, 0], "circle-junitary"),
    ]
    for k, (args, kind) in enumerate(cases):
        p = tmp_path / f"m{k}.json"
        code, _, _ = run(["make", *args, "--out", p], capsys)
        assert code == 0
        code, out, _ = run(["verify", p, "--kind", kind], capsys)
        assert code == 0, out
    psi = tmp_path / "psi.json"
    psi.write_text('{"t": -1, "a": [[[0.4, 0.3, -0.2, 0.5]]], "b": [[[1, 0, 0, 0]]],'
                   ' "c": [[[1, 0, 0, 0]]], "d": [[[0, 0, 0, 0]]]}')
    p = tmp_path / "phi.json"
    code, _, _ = run(["make", "phi-from-psi", "--psi", psi, "--kind", "line", "--out", p], capsys)
    assert code == 0
    code, _, _ = run(["verify", p, "--kind", "line-antisym"], capsys)
    assert code == 0


def test_make_precondition(capsys):
    code, _, err = run(["make", "blaschke-line", "--alpha", 0, 1, 0, 0], capsys)
    assert code == 29 and "DegenerateAlpha" in err


def test_minimality_and_degree(capsys):
    code, out, _ = run(["--json", "minimality", FIX / "double_x.json"], capsys)
    info = json.loads(out)
    assert code == 4 and not info["minimal"] and info["degree"] == 1
    code, out, _ = run(["degree", FIX / "theta.json"], capsys)
    assert code == 0 and out.strip() == "3"


def test_parse_error_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"t": -1, "a": [[[1,2,3]]]}')
    code, _, err = run(["degree", p], capsys)
    assert code == 3 and "line 1" in err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["verify"])
    assert info.value.code == 2
    code, _, _ = run(["degree", "/nonexistent/file.json"], capsys)
    assert code == 2


def test_selftest_filter_and_fault(capsys):
    code, out, _ = run(["selftest", "--filter", "quaternion", "--filter", "embedding"], capsys)
    assert code == 0 and out.count("[PASS]") == 2
    code, out, _ = run(["selftest", "--filter", "quaternion", "--inject-fault", "quaternion-sign"], capsys)
    assert code == 1 and "[FAIL]" in out
    code, _, err = run(["selftest", "--filter", "bogus"], capsys)
    assert code == 2 and "unknown group" in err
