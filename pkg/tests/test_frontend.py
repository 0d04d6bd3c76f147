"""Surface syntax, JSON reports, and the command-line interface."""

from __future__ import annotations

import json
import random
import string

import pytest

from varkit.checker import check_datatype
from varkit.cli import maxvar_summary, run_cli, tables_text
from varkit.diagnostics import E_ARITY, E_SYNTAX
from varkit.oracle import enumerate_universe, semantic_req
from varkit.parser import parse, pretty
from varkit.report import report_json
from varkit.types import App, Var, format_type
from varkit.variance import CONTRA, COV, INV

from conftest import GOLDEN, corpus_names, corpus_path, load_corpus
from _reference import random_type


# --------------------------------------------------------------------------
# Parsing.


def test_parse_exp(dsig):
    sig = load_corpus("exp.vt")  # asserts no diagnostics
    decl = sig.constructor("exp")
    assert [c.name for c in decl.constructors] == ["Val", "Int", "Thunk", "Prod"]
    assert decl.param_variances == (COV,)


def test_codomain_form_desugars_to_explicit_form():
    s1 = load_corpus("exp.vt")
    s2 = load_corpus("exp_codomain.vt")
    assert s1.decls["exp"] == s2.decls["exp"]
    assert s1 == s2


def test_arity_error_is_reported_not_raised():
    sig, diags = parse("type t(+a) = K of exists b [a = b]. list\n")
    assert any(d.code == E_ARITY for d in diags)


def test_syntax_error_spans():
    _sig, diags = parse("type t(+a) =\n  | K of ???\n")
    errs = [d for d in diags if d.code == E_SYNTAX]
    assert errs
    first = errs[0]
    assert (first.span.line, first.span.col) == (2, 10)
    assert first.render("f.vt").startswith("f.vt:2:10: error[E_SYNTAX]")


def test_lexing_without_spaces():
    sig, diags = parse(
        "type t(+a) = K of exists b [a = b]. b->b\n"
        "type t2(+a) = K2 of [a>=q]. int\n"
    )
    assert diags == []
    k = sig.constructor("t").constructors[0]
    assert k.argument == App("->", (Var("b"), Var("b")))
    k2 = sig.constructor("t2").constructors[0]
    assert k2.constraints[0].rhs == App("q")


def test_parse_never_raises_on_garbage():
    rng = random.Random(4242)
    alphabet = (
        list(string.ascii_lowercase)
        + list("()[]|=+-~*<>.,:")
        + ["type", "base", "axiom", "exists", "of", "->", "\n", " ", "#"]
    )
    for _ in range(200):
        src = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 80)))
        sig, diags = parse(src)  # must not raise
        assert isinstance(diags, list)


def test_pretty_round_trip_whole_corpus():
    for fname in corpus_names():
        sig = load_corpus(fname)
        text = pretty(sig)
        sig2, diags = parse(text)
        assert diags == [], (fname, text, diags)
        assert sig2 == sig, fname


def test_format_type_round_trips_through_parser():
    rng = random.Random(31)
    for _ in range(80):
        t = random_type(rng, ("b",), depth=3)
        src = f"type t(+a) = K of exists b [a = b]. {format_type(t)}\n"
        sig, diags = parse(src)
        assert diags == [], (src, diags)
        assert sig.constructor("t").constructors[0].argument == t, src


# --------------------------------------------------------------------------
# JSON reports.


def test_report_json_accepts():
    sig = load_corpus("exp.vt")
    doc = json.loads(report_json(check_datatype("exp", sig), "exp.vt"))
    assert doc["file"] == "exp.vt"
    (dt,) = doc["datatypes"]
    assert dt["name"] == "exp" and dt["accepted"] is True
    by_name = {c["name"]: c for c in dt["constructors"]}
    assert by_name["Val"]["witness_context"] == {"b": "+"}
    assert by_name["Int"]["witness_context"] == {}
    assert by_name["Thunk"]["witness_context"] == {"b": "=", "c": "+"}
    assert by_name["Prod"]["witness_context"] == {"b": "+", "c": "+"}


def test_report_json_failure_entry():
    sig = load_corpus("eq_cov.vt")
    doc = json.loads(report_json(check_datatype("eq", sig)))
    (dt,) = doc["datatypes"]
    assert dt["accepted"] is False
    (c,) = dt["constructors"]
    assert c["accepted"] is False and "witness_context" not in c
    assert c["failure"]["code"] == "R_ZIP"
    assert c["failure"]["variable"] == "g"


def test_report_json_irrelevant_spells_join():
    sig = load_corpus("irr.vt")
    doc = json.loads(report_json(check_datatype("ghost", sig)))
    (c,) = doc["datatypes"][0]["constructors"]
    assert c["witness_context"] == {"b": "join"}


def test_report_json_empty():
    doc = json.loads(report_json([], "empty.vt"))
    assert doc["datatypes"] == []
    assert doc["file"] == "empty.vt"
    assert "version" in doc


def test_report_json_merges_violation_over_acceptance():
    sig = load_corpus("eq_irr.vt")
    reports = check_datatype("eq_irr", sig)
    assert all(r.accepted for r in reports)
    viol = semantic_req("eq_irr", sig, enumerate_universe(sig, 1), slack=1)
    assert viol is not None
    doc = json.loads(report_json([*reports, viol]))
    (dt,) = doc["datatypes"]
    assert dt["accepted"] is False
    (c,) = dt["constructors"]
    assert c["name"] == "Refl" and c["accepted"] is False
    assert "witness_context" not in c
    f = c["failure"]
    assert f["code"] == "R_SEMANTIC"
    ov = f["oracle_violation"]
    assert ov["constructor"] == "Refl"
    assert ov["depth"] == 1 and ov["slack"] == 1
    assert len(ov["params"]) == 2 and len(ov["params_prime"]) == 2
    assert all(isinstance(s, str) for s in ov["params"])


# --------------------------------------------------------------------------
# The command-line interface.


def cvt(name: str) -> str:
    return str(corpus_path(name))


def test_cli_check_accept(capsys):
    assert run_cli(["check", cvt("exp.vt")]) == 0
    out = capsys.readouterr().out
    assert "exp: ACCEPT" in out
    assert "Thunk: ACCEPT  witness [b==, c=+]" in out


def test_cli_check_reject(capsys):
    assert run_cli(["check", cvt("eq_cov.vt")]) == 1
    out = capsys.readouterr().out
    assert "eq: REJECT" in out
    assert "[R_ZIP]" in out


def test_cli_check_json(capsys):
    assert run_cli(["check", cvt("exp.vt"), "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["datatypes"][0]["name"] == "exp"


def test_cli_missing_file(capsys):
    assert run_cli(["check", "no/such/file.vt"]) == 2
    assert "varkit:" in capsys.readouterr().err


def test_cli_unparsable_file(tmp_path, capsys):
    bad = tmp_path / "bad.vt"
    bad.write_text("type t(+a) =\n  | K of ???\n")
    assert run_cli(["check", str(bad)]) == 2
    assert "E_SYNTAX" in capsys.readouterr().err


def test_cli_oracle(capsys):
    assert run_cli(["oracle", cvt("exp.vt"), "--depth", "2"]) == 0
    assert "NO VIOLATION" in capsys.readouterr().out
    assert run_cli(["oracle", cvt("p_closure.vt"), "--depth", "2"]) == 1
    assert "VIOLATION" in capsys.readouterr().out


def test_cli_oracle_cap(capsys):
    rc = run_cli(["oracle", cvt("exp.vt"), "--depth", "2", "--cap", "10"])
    assert rc == 2
    assert "varkit:" in capsys.readouterr().err


def test_cli_oracle_json(capsys):
    rc = run_cli(["oracle", cvt("p_closure.vt"), "--depth", "1", "--json"])
    assert rc == 1
    doc = json.loads(capsys.readouterr().out)
    (dt,) = doc["datatypes"]
    assert dt["name"] == "t" and dt["accepted"] is False
    assert dt["constructors"][0]["failure"]["code"] == "R_SEMANTIC"


def test_cli_diff_agreements(capsys):
    assert run_cli(["diff", cvt("exp.vt"), "--depth", "2"]) == 0
    assert "agree (accept)" in capsys.readouterr().out
    assert run_cli(["diff", cvt("p_closure.vt"), "--depth", "2"]) == 0
    assert "agree (reject, violation found)" in capsys.readouterr().out


def test_cli_diff_finds_real_mismatch(capsys):
    # The one curated declaration on which the syntactic criterion and
    # the bounded search disagree: acceptance is unsound here, and the
    # oracle exhibits the violation.
    assert run_cli(["diff", cvt("eq_irr.vt"), "--depth", "2"]) == 3
    out = capsys.readouterr().out
    assert "MISMATCH" in out and "checker accepted" in out


def test_cli_diff_inconclusive(capsys):
    assert run_cli(["diff", cvt("inconclusive.vt"), "--depth", "2"]) == 0
    captured = capsys.readouterr()
    assert "w2: inconclusive (reject, no finite witness)" in captured.out
    assert "W_INCONCLUSIVE" in captured.err


def test_cli_tables_match_goldens(capsys):
    assert run_cli(["tables"]) == 0
    out = capsys.readouterr().out
    golden = (
        (GOLDEN / "compose_table.txt").read_text()
        + "\n"
        + (GOLDEN / "zip_table.txt").read_text()
    )
    assert out == golden
    assert out == tables_text()


def test_cli_maxvar(capsys):
    assert run_cli(["maxvar", cvt("exp.vt"), "exp"]) == 0
    out = capsys.readouterr().out
    assert "exp parameter a: accepted {=, +}; maximal {=}; minimal {+}" in out
    assert run_cli(["maxvar", cvt("exp.vt"), "nope"]) == 2


def test_maxvar_summary_values():
    sig = load_corpus("exp.vt")
    ((pname, accepted, maximal, minimal),) = maxvar_summary(sig, "exp")
    assert pname == "a"
    assert accepted == [INV, COV]
    assert maximal == [INV]
    assert minimal == [COV]


def test_maxvar_summary_contravariant_case():
    sig = load_corpus("sinks.vt")
    rows = dict(
        (p, (acc, mx, mn)) for p, acc, mx, mn in maxvar_summary(sig, "sink")
    )
    acc, mx, mn = rows["a"]
    assert acc == [INV, CONTRA]
    assert mx == [INV] and mn == [CONTRA]


def test_cli_usage_errors(capsys):
    assert run_cli([]) == 2
    capsys.readouterr()
    assert run_cli(["--version"]) == 0
    assert "varkit" in capsys.readouterr().out


def test_cli_color_toggle(monkeypatch, capsys):
    monkeypatch.setenv("VARKIT_COLOR", "1")
    run_cli(["check", cvt("exp.vt")])
    assert "\x1b[32m" in capsys.readouterr().out
    monkeypatch.setenv("VARKIT_COLOR", "0")
    run_cli(["check", cvt("exp.vt")])
    assert "\x1b[" not in capsys.readouterr().out
