from __future__ import annotations

import json
from fractions import Fraction

import pytest

from groupoid_lab.action import EquivariantSystem, negation_space
from groupoid_lab.cli import main, run_command
from groupoid_lab.induction import regular_rep, trivial_rep
from groupoid_lab.errors import DocumentSyntaxError, SchemaError
from groupoid_lab.fixtures import builtin_group, correspondence_fixtures, groupoid_fixtures, hyper_fixtures
from groupoid_lab.groupoid import pair_groupoid
from groupoid_lab.io import (
    action_doc,
    correspondence_doc,
    dumps,
    element_doc,
    groupoid_doc,
    hypergroupoid_doc,
    parse_document,
    parse_scalar,
    representation_doc,
)
from groupoid_lab.report import Report, emit_report

from conftest import FIXTURES


def _roundtrip(doc: dict, tmp_path, name="doc.json"):
    text = dumps(doc)
    parsed = parse_document(text)
    p = tmp_path / name
    p.write_text(text)
    rep, code, _ = run_command(["validate", str(p)])
    return parsed, rep, code


def test_minimal_group_document(fixture_dir):
    doc = parse_document((fixture_dir / "z2.json").read_text())
    assert doc.kind == "groupoid"
    G, lam = doc.value
    assert set(G.arrows) == {"e", "s"}


def test_weight_fraction_is_exact():
    text = json.dumps({"kind": "groupoid", "units": ["u"], "arrows": [{"id": "u", "src": "u", "dst": "u", "inv": "u"}],
                       "compose": [["u", "u", "u"]], "haar": {"u": "1/3"}})
    G, lam = parse_document(text).value
    assert lam["u"] == Fraction(1, 3) and isinstance(lam["u"], Fraction)
    assert parse_scalar("-2/6") == Fraction(-1, 3)


def test_unknown_compose_arrow_path():
    body = groupoid_doc(pair_groupoid(2))
    assert len(body["compose"]) == 8
    body["compose"][7] = [body["compose"][7][0], body["compose"][7][1], "nope"]
    with pytest.raises(SchemaError) as exc:
        parse_document(dumps(body))
    assert exc.value.path == "compose[7]"


def test_syntax_error_position():
    with pytest.raises(DocumentSyntaxError) as exc:
        parse_document('{\n  "kind": "groupoid",\n  "units": [,]\n}')
    assert (exc.value.line, exc.value.col) == (3, 13)


def test_schema_error_missing_key():
    with pytest.raises(SchemaError):
        parse_document('{"kind": "groupoid", "units": []}')


@pytest.mark.parametrize("label,G,lam", groupoid_fixtures(), ids=[g[0] for g in groupoid_fixtures()])
def test_groupoid_roundtrip(label, G, lam, tmp_path):
    doc = groupoid_doc(G, lam)
    parsed, rep, code = _roundtrip(doc, tmp_path)
    assert code == 0 and rep.ok
    assert dumps(groupoid_doc(*parsed.value)) == dumps(doc)


@pytest.mark.parametrize("label,C", correspondence_fixtures(), ids=[c[0] for c in correspondence_fixtures()])
def test_correspondence_roundtrip(label, C, tmp_path):
    doc = correspondence_doc(C)
    parsed, rep, code = _roundtrip(doc, tmp_path)
    assert code == 0, emit_report(rep)
    assert dumps(correspondence_doc(parsed.value)) == dumps(doc)


@pytest.mark.parametrize("label,H,lam,ctx", hyper_fixtures(), ids=[h[0] for h in hyper_fixtures()])
def test_hypergroupoid_roundtrip(label, H, lam, ctx, tmp_path):
    doc = hypergroupoid_doc(H, lam)
    parsed, rep, code = _roundtrip(doc, tmp_path)
    assert code == 0
    assert dumps(hypergroupoid_doc(*parsed.value)) == dumps(doc)


def test_action_and_representation_roundtrip(tmp_path):
    X = negation_space()
    doc = action_doc(X, alpha=EquivariantSystem({p: 1 for p in X.points}))
    _, rep, code = _roundtrip(doc, tmp_path, "a.json")
    assert code == 0
    S3 = builtin_group("s3")
    for R in (trivial_rep(S3), regular_rep(S3)):
        doc = representation_doc(R)
        parsed, rep, code = _roundtrip(doc, tmp_path, "r.json")
        assert code == 0
        assert dumps(representation_doc(parsed.value)) == dumps(doc)


def test_element_roundtrip():
    f = {"e": Fraction(1, 3), "s": 2}
    assert parse_document(dumps(element_doc(f))).value == f


def test_cli_validate_example(fixture_dir):
    rep, code, text = run_command(["validate", str(fixture_dir / "z2.json")])
    assert code == 0 and text.startswith("OK (0 findings)")


def test_cli_doublecoset_example(fixture_dir):
    rep, code, text = run_command(["hyper", "doublecoset", str(fixture_dir / "s3.json"), "--k", "12"])
    assert code == 0
    doc = parse_document(text)
    H, lam = doc.value
    assert doc.kind == "hypergroupoid" and len(H.elements) == 2


def test_cli_reduced_norm_example(fixture_dir):
    rep, code, text = run_command(["norm", "--reduced", str(fixture_dir / "z2.json"), "--element", "ones.json"])
    assert code == 0
    value, tol = rep.metrics["reduced"]
    assert abs(value - 2.0) <= 1e-9


def test_cli_exit_code_one_on_violations(tmp_path):
    body = groupoid_doc(pair_groupoid(2))
    body["arrows"][0]["inv"] = body["arrows"][1]["id"]
    p = tmp_path / "bad.json"
    p.write_text(dumps(body))
    rep, code, text = run_command(["validate", str(p)])
    assert code == 1 and not rep.ok


@pytest.mark.parametrize("argv", [["frobnicate"], ["validate", "/nonexistent.json"],
                                  ["validate", FIXTURES + "/z2.json", "--seed", "xyz"],
                                  ["validate", FIXTURES + "/z2.json", "--tolerance", "-1"]])
def test_cli_exit_code_two(argv):
    rep, code, text = run_command(argv)
    assert code == 2 and rep.error


def test_cli_syntax_error_is_exit_two(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{")
    rep, code, text = run_command(["validate", str(p)])
    assert code == 2 and "line 1" in text


def test_json_format_mirrors_text(fixture_dir):
    args = ["norm", str(fixture_dir / "z2.json"), "--element", "ones.json"]
    _, _, text = run_command(args)
    _, _, js = run_command(args + ["--format", "json"])
    data = json.loads(js)
    assert data["status"] == "ok"
    for name in data["metrics"]:
        assert name in text


def test_report_ordering_is_stable():
    a, b = Report(), Report()
    for code, wit in [("z", ("1",)), ("a", ("2",)), ("a", ("1",))]:
        a.add(code, wit)
    for code, wit in [("a", ("1",)), ("z", ("1",)), ("a", ("2",))]:
        b.add(code, wit)
    assert emit_report(a) == emit_report(b)
    assert [f.code for f in a.sorted_findings()] == ["a", "a", "z"]


def test_cli_builds_validate(tmp_path):
    cases = [["build", "group", "s3"], ["build", "pair", "3", "--weights", "1=1,2=1/2,3=3"],
             ["build", "rep", "regular", "z4"], ["build", "correspondence", "negation"],
             ["build", "correspondence", "induction", "s3", "--k", "12"]]
    for i, argv in enumerate(cases):
        rep, code, text = run_command(argv)
        assert code == 0, argv
        p = tmp_path / f"b{i}.json"
        p.write_text(text)
        assert run_command(["validate", str(p)])[1] == 0, argv


def test_cli_commands_are_deterministic(fixture_dir, tmp_path):
    ident = tmp_path / "id1.json"
    ident.write_text(run_command(["build", "correspondence", "identity", "z1"])[2])
    cases = [["convolve", str(fixture_dir / "s3.json"), "s3_123.json", "s3_123.json"],
             ["compose-corr", str(fixture_dir / "negation.json"), str(ident)],
             ["induce", str(fixture_dir / "induction_s3_k.json"), "--rep", str(fixture_dir / "trivial_k.json")],
             ["hyper", "check", str(fixture_dir / "negation_space.json")]]
    for a in cases:
        first = run_command(a)
        assert first[1] in (0, 1), (a, first[2])
        assert first[2] == run_command(a)[2]


def test_cli_mismatched_composition_is_an_error(fixture_dir):
    neg = str(fixture_dir / "negation.json")
    rep, code, text = run_command(["compose-corr", neg, neg])
    assert code == 2 and "InnerMismatch" in text


def test_main_writes_out_file(fixture_dir, tmp_path):
    out = tmp_path / "o.txt"
    assert main(["validate", str(fixture_dir / "z2.json"), "--out", str(out)]) == 0
    assert out.read_text().startswith("OK (0 findings)")


def test_cli_relative_norm_on_spatial_fixture(fixture_dir):
    # f is the adjacency of the path -1 - 0 - 1 on l2(X), norm sqrt(2)
    rep, code, _ = run_command(["hyper", "norm", str(fixture_dir / "negation_space.json"),
                                "--element", "negation_pair.json"])
    assert code == 0
    for k in ("reduced", "full", "relative"):
        assert abs(rep.metrics[k][0] - 2 ** 0.5) < 1e-9
    assert rep.metrics["strict_quotient"][0] is False
