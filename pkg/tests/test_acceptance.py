"""Acceptance criteria: one test per criterion, pinned budgets included.

Each test prints ``ACCEPTANCE n (<label>): PASS`` as its final line, so
a verbose run shows one line per criterion either way (the test name
carries the criterion number on failure).
"""

from __future__ import annotations

import itertools
import random
import time

from varkit.checker import (
    check_constructor,
    check_datatype,
    check_decomposability,
    check_variance,
    decomp_boxes,
    min_context,
    verify_report,
)
from varkit.cli import tables_text
from varkit.oracle import (
    deepen,
    enumerate_universe,
    generate_declarations,
    recheck_violation,
    semantic_decomposability,
    semantic_req,
    semantic_variance,
)
from varkit.types import App, Kind, TypeConDecl, Var, encode_plain_constructor, format_type
from varkit.variance import (
    ALL_VARIANCES,
    CONTRA,
    COV,
    INV,
    IRR,
    compose,
    context_leq,
    glb,
    leq,
    lub,
    up_set,
    zip_var,
)

from conftest import GOLDEN, corpus_names, load_corpus
from test_checker import CORPUS_VERDICTS
from _reference import (
    all_contexts,
    brute_glb,
    brute_lub,
    derivable,
    derivable_contexts,
    random_context,
    random_type,
    ref_check_variance,
)


def _done(n: int, label: str, t0: float, budget: float) -> None:
    elapsed = time.monotonic() - t0
    assert elapsed < budget, f"criterion {n} took {elapsed:.1f}s (budget {budget}s)"
    print(f"ACCEPTANCE {n} ({label}): PASS [{elapsed:.1f}s]")


# --------------------------------------------------------------------------


def test_acceptance_01_variance_algebra():
    t0 = time.monotonic()
    # The order: exactly nine related pairs.
    true_pairs = {(v, w) for v in ALL_VARIANCES for w in ALL_VARIANCES if leq(v, w)}
    expected = (
        {(v, v) for v in ALL_VARIANCES}
        | {(IRR, w) for w in ALL_VARIANCES}
        | {(v, INV) for v in ALL_VARIANCES}
    )
    assert true_pairs == expected and len(true_pairs) == 9
    # Lattice operations agree with brute-force bounds.
    for v in ALL_VARIANCES:
        for w in ALL_VARIANCES:
            assert glb(v, w) is brute_glb(v, w)
            assert lub(v, w) is brute_lub(v, w)
            # zip is defined exactly when one side is ~ or both are =,
            # and equals the join there.
            z = zip_var(v, w)
            defined = (v is IRR) or (w is IRR) or (v is INV and w is INV)
            assert (z is not None) is defined
            if defined:
                assert z is lub(v, w)
    # Composition: identity, absorption, associativity.
    for v in ALL_VARIANCES:
        assert compose(COV, v) is v and compose(v, COV) is v
        assert compose(IRR, v) is IRR and compose(v, IRR) is IRR
        for w in ALL_VARIANCES:
            for x in ALL_VARIANCES:
                assert compose(compose(v, w), x) is compose(v, compose(w, x))
    # The printed tables are byte-identical to the golden files.
    golden = (
        (GOLDEN / "compose_table.txt").read_text()
        + "\n"
        + (GOLDEN / "zip_table.txt").read_text()
    )
    assert tables_text() == golden
    _done(1, "variance algebra", t0, 5.0)


def test_acceptance_02_corpus_verdicts():
    t0 = time.monotonic()
    assert sorted(corpus_names()) == sorted(CORPUS_VERDICTS)
    checked = 0
    for fname, datatypes in CORPUS_VERDICTS.items():
        sig = load_corpus(fname)
        for name, ctors in datatypes.items():
            for r in check_datatype(name, sig):
                expect = ctors[r.constructor]
                checked += 1
                if expect[0] == "accept":
                    assert r.accepted, (fname, name, r.constructor)
                    assert {
                        k: v.symbol for k, v in r.witness.items()
                    } == expect[1], (fname, name, r.constructor)
                else:
                    assert not r.accepted, (fname, name, r.constructor)
                    assert r.failure.code == expect[1], (fname, name)
    assert checked == 42  # constructors across the whole corpus
    _done(2, "corpus verdicts", t0, 10.0)


def test_acceptance_03_accepted_generated_declarations_survive_oracle():
    t0 = time.monotonic()
    accepted = 0
    for sig, _ann in itertools.islice(generate_declarations(2026), 500):
        reports = check_datatype("t", sig)
        if not all(r.accepted for r in reports):
            continue
        accepted += 1
        u = enumerate_universe(sig, 3)
        viol = semantic_req("t", sig, u, slack=1)
        assert viol is None, (sig.constructor("t"), viol)
    assert accepted >= 50  # the sweep must not be vacuous
    _done(3, f"no violation in {accepted} accepted generated decls", t0, 300.0)


def test_acceptance_04_rejected_corpus_declarations_expose_violations():
    t0 = time.monotonic()
    rejects = [
        (fname, name)
        for fname, dts in sorted(CORPUS_VERDICTS.items())
        for name, ctors in dts.items()
        if any(v[0] == "reject" for v in ctors.values())
        and (fname, name) != ("inconclusive.vt", "w2")
    ]
    assert len(rejects) == 11
    for fname, name in rejects:
        sig = load_corpus(fname)
        u3 = enumerate_universe(sig, 3, cap=4_000_000)
        viol = semantic_req(name, sig, u3, slack=1)
        assert viol is not None, (fname, name)
        assert recheck_violation(viol, sig), (fname, name)
        # Stability: the violation is not an artifact of the slack
        # regime — it persists at depth 4 with no slack at all.
        decl = sig.constructor(name)
        support = max(len(c.existentials) for c in decl.constructors)
        inst = u3 if support <= 1 else enumerate_universe(sig, 2)
        viol4 = semantic_req(
            name, sig, deepen(u3, 1), slack=0, inst_universe=inst
        )
        assert viol4 is not None, (fname, name)
    _done(4, "rejects refuted and stable across regimes", t0, 300.0)


def test_acceptance_05_syntactic_criterion_sound_for_bounded_semantics(dsig, u2, u3):
    t0 = time.monotonic()
    B, G = Var("b"), Var("g")
    curated = [
        ({"b": COV}, B, COV, INV),
        ({"b": INV}, B, COV, INV),
        ({"b": COV}, App("p", (B,)), COV, INV),
        ({"b": COV}, App("list", (B,)), COV, INV),
        ({"b": COV}, App("ref", (B,)), COV, INV),
        ({"b": INV}, App("ref", (B,)), COV, INV),
        ({"b": IRR}, App("int"), COV, INV),
        ({"b": COV, "g": COV}, App("*", (B, G)), COV, INV),
    ]
    for g, t, v, v2 in curated:
        syntactic = check_decomposability(g, t, v, v2, dsig)
        semantic = semantic_variance(g, t, v, u3) and semantic_decomposability(
            g, t, v, v2, u3
        )
        assert syntactic is semantic, (g, t, v, v2)
    # Flagship repeated-occurrence cases, with pinned verdicts: two
    # distinct covariant variables adjust independently; one variable
    # twice covariantly cannot (the two positions' witnesses diverge);
    # twice invariantly can (both witnesses are forced equal); and an
    # occurrence under an irrelevant-parameter wrapper never interferes
    # (any witness works there).  Run over the default signature plus
    # such a wrapper so all four share one bounded universe.
    isig = dsig.with_decl(
        TypeConDecl("opq", Kind.ABSTRACT, (IRR,), True, True,
                    param_names=("a",))
    )
    iu3 = enumerate_universe(isig, 3)
    RB = App("ref", (B,))
    flagship = [
        ({"b": COV, "g": COV}, App("*", (B, G)), COV, INV, True),
        ({"b": COV}, App("*", (B, B)), COV, INV, False),
        ({"b": INV}, App("*", (RB, RB)), COV, INV, True),
        ({"b": COV}, App("*", (B, App("opq", (B,)))), COV, INV, True),
    ]
    for g, t, v, v2, expect in flagship:
        syntactic = check_decomposability(g, t, v, v2, isig)
        assert syntactic is expect, (g, t, v, v2, expect)
        semantic = semantic_variance(g, t, v, iu3) and semantic_decomposability(
            g, t, v, v2, iu3
        )
        assert syntactic is semantic, (g, t, v, v2)
    # Fuzzed soundness at depth 2: whatever the syntax derives, the
    # bounded search cannot refute — neither the variance claim nor
    # the adjustment property.
    rng = random.Random(2026)
    names = ("a", "b")
    confirmed = 0
    for _ in range(1000):
        t = random_type(rng, names, depth=2)
        g = random_context(rng, names)
        v = rng.choice(ALL_VARIANCES)
        v2 = rng.choice(ALL_VARIANCES)
        if not check_decomposability(g, t, v, v2, dsig):
            continue
        confirmed += 1
        assert semantic_variance(g, t, v, u2), (g, t, v)
        assert semantic_decomposability(g, t, v, v2, u2), (g, t, v, v2)
    assert confirmed >= 100
    _done(5, f"criterion sound on {confirmed} fuzzed + 12 curated", t0, 240.0)


def test_acceptance_06_box_decision_matches_rule_derivability(dsig):
    t0 = time.monotonic()
    rng = random.Random(606)
    pool = ("a", "b", "c")
    agree_true = agree_false = 0
    for i in range(200):
        names = pool[: 1 + i % 3]
        contexts = list(all_contexts(names))
        t = random_type(rng, names, depth=3)
        memo: dict = {}
        for v in ALL_VARIANCES:
            for v2 in ALL_VARIANCES:
                boxes = decomp_boxes(t, v, v2, dsig, names)
                want_set = derivable_contexts(t, v, v2, dsig, names, memo)
                for g in contexts:
                    got = boxes.member(g)
                    want = tuple(g[n] for n in names) in want_set
                    assert got is want, (g, t, v, v2)
                    if got:
                        agree_true += 1
                    else:
                        agree_false += 1
        # Spot-check the set-valued rule search against the pointwise
        # one so the faster reference cannot drift.
        if len(names) <= 2:
            g = random_context(rng, names)
            v = rng.choice(ALL_VARIANCES)
            v2 = rng.choice(ALL_VARIANCES)
            assert derivable(g, t, v, v2, dsig) is (
                tuple(g[n] for n in names)
                in derivable_contexts(t, v, v2, dsig, names, memo)
            )
    assert agree_true and agree_false
    _done(6, f"{agree_true + agree_false} decisions match rules", t0, 120.0)


def test_acceptance_07_judgment_structure(dsig, u2):
    t0 = time.monotonic()
    rng = random.Random(707)
    names = ("a", "b")
    for _ in range(500):
        t = random_type(rng, names, depth=3)
        v = rng.choice(ALL_VARIANCES)
        g = random_context(rng, names)
        mc = min_context(t, v, dsig, names)
        # Principality: the minimal context derives the judgment.
        assert check_variance(mc, t, v, dsig)
        # Inversion: any context derives it iff it dominates the minimum.
        assert check_variance(g, t, v, dsig) is context_leq(mc, g)
        # Monotonicity: raising promises can never break a derivation.
        g2 = {a: rng.choice(sorted(up_set(w), key=str)) for a, w in g.items()}
        if check_variance(g, t, v, dsig):
            assert check_variance(g2, t, v, dsig)
        # Invariant demands collapse to {=, ~}.
        assert all(w in (INV, IRR) for w in min_context(t, INV, dsig).values())
    # Semantic anti-monotonicity of adjustment at depth 2: a higher
    # (more constraining) context only shrinks the moves to adjust to,
    # so adjustability there implies adjustability below.
    checked = 0
    for _ in range(500):
        t = random_type(rng, ("b",), depth=2)
        v = rng.choice(ALL_VARIANCES)
        v2 = rng.choice(ALL_VARIANCES)
        w1 = rng.choice(ALL_VARIANCES)
        w2 = rng.choice(sorted(up_set(w1), key=str))
        if semantic_decomposability({"b": w2}, t, v, v2, u2):
            checked += 1
            assert semantic_decomposability({"b": w1}, t, v, v2, u2), (
                t, v, v2, w1, w2,
            )
    assert checked >= 100
    _done(7, "principality, inversion, monotonicity", t0, 240.0)


def test_acceptance_08_plain_adt_encoding_reduces_to_classic_check(dsig):
    """Exact agreement of the encoded check with the direct check.

    Routing every parameter through an equality constraint on a fresh
    existential should make accepting the encoded constructor coincide
    with checking the raw argument type directly under the declared
    annotations.  The two sides provably agree whenever every
    annotation is +, -, or =, and on one-parameter datatypes outright
    (see the boundary tests in test_checker.py / test_oracle.py).  With
    two or more parameters, a ~-annotated parameter that genuinely
    occurs in the argument is enforced only by the direct check: the
    constraint-merge step absorbs its demand into a neighbouring
    constraint's unconstrained slot, and the bounded semantic search
    refutes exactly those extra acceptances — the direct check is the
    sound side.  This criterion is pinned to exact agreement over the
    full annotation alphabet and currently fails on draws hitting that
    corner; the divergence is a real property of the merge rules, not
    noise, so it is reported rather than narrowed away.
    """
    t0 = time.monotonic()
    rng = random.Random(808)
    params = ("a", "b")
    diverged = []
    for _ in range(200):
        arg = random_type(rng, params, depth=2)
        anns = (rng.choice(ALL_VARIANCES), rng.choice(ALL_VARIANCES))
        enc = encode_plain_constructor("K", params, arg)
        rep = check_constructor(enc, anns, dsig, "t")
        classic = ref_check_variance(
            {"a": anns[0], "b": anns[1]}, arg, COV, dsig
        )
        if classic:
            # The direct check is the stricter side; any acceptance it
            # grants must survive the encoding.  A failure here would
            # be an outright implementation fault.
            assert rep.accepted, (arg, anns)
        if rep.accepted:
            assert verify_report(rep, enc, dsig), (arg, anns)
        if rep.accepted is not classic:
            # Only the known corner may separate the two sides: an
            # encoded-side acceptance of a ~-annotated parameter whose
            # variable carries a real demand in the argument.
            demands = min_context(arg, COV, dsig, params)
            assert rep.accepted and not classic, (arg, anns)
            assert any(
                anns[i] is IRR and demands[p] is not IRR
                for i, p in enumerate(params)
            ), (arg, anns)
            diverged.append((arg, anns, rep.accepted, classic))
    first = "" if not diverged else (
        "; first: type ({} a, {} b) t = K of {} -> encoded {}, direct {}"
        .format(
            diverged[0][1][0].symbol,
            diverged[0][1][1].symbol,
            format_type(diverged[0][0]),
            "accept" if diverged[0][2] else "reject",
            "accept" if diverged[0][3] else "reject",
        )
    )
    assert not diverged, (
        f"{len(diverged)}/200 generated datatypes: encoded check disagrees "
        f"with the direct check{first} (every divergence is an encoded-side "
        f"acceptance of a ~-annotated parameter occurring non-irrelevantly; "
        f"the bounded semantic search refutes those acceptances)"
    )
    _done(8, "plain ADT encoding equivalence", t0, 60.0)
