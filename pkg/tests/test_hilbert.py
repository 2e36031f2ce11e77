import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import formulas, random_derivation
from meetimp import hilbert as H
from meetimp.syntax import TOP, And, Box, Imp, Letter, Mon, iff, parse

p, q, r = Letter("p"), Letter("q"), Letter("r")


def ok(proof, sys=H.MI):
    rep = H.check_proof(sys, proof)
    assert rep, rep
    return proof


# ---------------------------------------------------------------- checking


def test_identity_proof_is_the_five_line_derivation():
    pf = ok(H.prove_identity(p))
    assert pf.size() == 5 and pf.conclusion == Imp(p, p)
    h2 = pf.kids[1].kids[1]
    assert h2.axiom == "H2"
    assert h2.conclusion == parse("(p -> (p -> p) -> p) -> (p -> p -> p) -> p -> p")
    assert [n.axiom for n in (pf.kids[0], pf.kids[1].kids[0])] == ["H1", "H1"]


def test_single_axiom_top():
    ok(H.ax((), "H6", {}))


def test_mismatched_minor_is_reported():
    bad = H.HNode((), q, "mp", kids=(H.ax((), "H6", {}), H.ax((), "H1", {"p": p, "q": q})))
    rep = H.check_proof(H.MI, bad)
    assert not rep and rep.path == () and "minor" in rep.reason


def test_bad_instance_and_unavailable_axiom():
    forged = H.HNode((), parse("p -> q -> q"), "ax", "H1", (("p", p), ("q", q)))
    assert not H.check_proof(H.MI, forged)
    b2 = H.ax((), "B2", {})
    assert not H.check_proof(H.MI, b2)
    ok(b2, H.MI_BOX)
    assert not H.check_proof(H.MI_MON, b2)


def test_assumption_must_be_in_context():
    assert not H.check_proof(H.MI, H.HNode((q,), p, "ass"))
    ok(H.ass([p, q], p))


def test_nested_failure_path():
    inner = H.HNode((), q, "ass")
    bad = H.mp(inner, H.ax((), "H1", {"p": q, "q": p}))
    rep = H.check_proof(H.MI, bad)
    assert not rep and rep.path == (0,)


def test_cong_rules():
    b = H.cong(H.conj_intro(H.prove_identity(p), H.prove_identity(p)), "box")
    assert b.conclusion == iff(Box(p), Box(p))
    ok(b, H.MI_BOX)
    assert not H.check_proof(H.MI, b)
    assert not H.check_proof(H.MI_MON, b)
    m = H.cong(H.conj_intro(H.prove_identity(q), H.prove_identity(q)), "mon")
    ok(m, H.MI_MON)
    # A premise with non-empty context cannot be congruence-closed.
    hyps = [Imp(p, q), Imp(q, p)]
    hyp = H.conj_intro(H.ass(hyps, Imp(p, q)), H.ass(hyps, Imp(q, p)))
    ok(hyp)
    assert not H.check_proof(H.MI_BOX, H.cong(hyp, "box"))


def test_system_lookup():
    assert H.system("mibox") is H.MI_BOX
    assert H.MI_MON.axioms[-1] == "M1"
    with pytest.raises(ValueError):
        H.system("k4")


# ---------------------------------------------------------------- transformations


@pytest.mark.parametrize("a", [p, TOP, And(p, q), parse("[]p -> q")])
def test_identity_examples(a):
    pf = ok(H.prove_identity(a), H.MI_BOX)
    assert pf.conclusion == Imp(a, a)


def test_weaken_examples():
    w = ok(H.weaken(H.ax((), "H6", {}), p))
    assert w.rule == "ax" and w.context == (p,)
    w = ok(H.weaken(H.ass([p], p), q))
    assert set(w.context) == {p, q} and w.rule == "ass"
    w = ok(H.weaken(H.prove_identity(p), q))

    def contexts(n):
        yield n.context
        for k in n.kids:
            yield from contexts(k)

    assert set(contexts(w)) == {(q,)}


def test_weaken_rejects_invalid():
    with pytest.raises(H.InvalidInput):
        H.weaken(H.HNode((), p, "ass"), q)


def test_deduction_examples():
    d = ok(H.deduction(H.ass([p], p), p))
    assert d.conclusion == Imp(p, p) and d.size() == 5
    d = ok(H.deduction(H.ax([p], "H6", {}), p))
    assert d.conclusion == Imp(p, TOP)
    assert d.kids[1].axiom == "H1" and d.kids[1].conclusion == Imp(TOP, Imp(p, TOP))
    ctx = [p, q]
    pq = H.mp(H.ass(ctx, q), H.mp(H.ass(ctx, p), H.ax(ctx, "H5", {"p": p, "q": q})))
    ok(pq)
    d = ok(H.deduction(H.deduction(pq, q), p))
    assert d.context == () and d.conclusion == parse("p -> q -> p & q")
    ok(H.ax((), "H5", {"p": p, "q": q}))


def test_undeduction_examples():
    u = ok(H.undeduction(H.ax((), "H1", {"p": p, "q": q})))
    assert u.context == (p,) and u.conclusion == Imp(q, p)
    u = ok(H.undeduction(H.prove_identity(p)))
    assert u.context == (p,) and u.conclusion == p
    with pytest.raises(H.InvalidInput):
        H.undeduction(H.ax((), "H6", {}))


def test_deduction_undeduction_roundtrip():
    pf = H.ax((), "H3", {"p": p, "q": q})
    back = ok(H.deduction(H.undeduction(pf), And(p, q)))
    assert back.conclusion == pf.conclusion and back.context == pf.context


def test_conj_examples():
    t = ok(H.conj_intro(H.ax((), "H6", {}), H.ax((), "H6", {})))
    assert t.conclusion == And(TOP, TOP)
    l, rr = H.conj_split(H.ass([And(p, q)], And(p, q)))
    ok(l), ok(rr)
    assert (l.conclusion, rr.conclusion) == (p, q)
    assert l.kids[1].axiom == "H3" and rr.kids[1].axiom == "H4"


def test_conj_context_roundtrip():
    ctx = [r, p, q]
    base = H.conj_intro(H.ass(ctx, q), H.ass(ctx, p))  # r, p, q ⊢ q ∧ p
    merged = ok(H.conj_context(base, p, q))
    assert set(merged.context) == {r, And(p, q)} and merged.conclusion == And(q, p)
    split = ok(H.conj_uncontext(merged, p, q))
    assert set(split.context) == {r, p, q} and split.conclusion == And(q, p)


def test_syllogism():
    pq = H.ax((), "H3", {"p": p, "q": q})  # p & q -> p
    qr = H.ax((), "H1", {"p": p, "q": r})  # p -> r -> p
    s = ok(H.syllogism(pq, qr))
    assert s.conclusion == parse("p & q -> r -> p")


_CTX = [[p], [p, Imp(p, q)], [And(p, q), r], [Imp(q, r), q, p]]


@given(st.integers(0, 10**6), st.sampled_from(_CTX), st.integers(1, 12))
def test_transformations_are_sound(seed, ctx, steps):
    rng = random.Random(seed)
    d = ok(random_derivation(rng, ctx, steps))
    for a in ctx:
        out = ok(H.deduction(d, a))
        assert out.conclusion == Imp(a, d.conclusion)
        assert set(out.context) == set(ctx) - {a}
        back = ok(H.undeduction(out))
        assert back.conclusion == d.conclusion and set(back.context) == set(out.context) | {a}
    ok(H.weaken(d, Letter("s")))


# ---------------------------------------------------------------- theorem sampler and JSON


@pytest.fixture(scope="module")
def theorems():
    return {s.tag: H.enumerate_theorems(s, ["p", "q"], 3) for s in (H.MI, H.MI_BOX, H.MI_MON)}


def test_sampler_contains_landmarks(theorems):
    assert Imp(p, p) in H.enumerate_theorems(H.MI, ["p"], 2)
    assert Imp(Box(TOP), TOP) in theorems["MI_Box"]
    assert parse("<m>(p & q) -> <m>p") in theorems["MI_Mon"]
    assert Imp(p, p) in theorems["MI"]


def test_sampler_proofs_check(theorems):
    systems = {"MI": H.MI, "MI_Box": H.MI_BOX, "MI_Mon": H.MI_MON}
    for tag, T in theorems.items():
        assert not T.partial and len(T) > 1000
        for f in T.formulas[:: max(1, len(T) // 150)]:
            pf = T.proofs[f]
            assert pf.conclusion == f and pf.context == ()
            ok(pf, systems[tag])


def test_sampler_is_deterministic(theorems):
    again = H.enumerate_theorems(H.MI, ["p", "q"], 3)
    assert again.formulas == theorems["MI"].formulas


def test_budget_flags_partial():
    T = H.enumerate_theorems(H.MI, ["p", "q"], 3, budget=50)
    assert T.partial and len(T.proofs) <= 50


def test_json_roundtrip():
    pf = H.cong(H.conj_intro(H.prove_identity(p), H.prove_identity(p)), "mon")
    text = json.dumps(H.proof_to_json(pf))
    back = H.proof_from_json(text)
    ok(back, H.MI_MON)
    assert H.proof_to_json(back) == H.proof_to_json(pf)
    with pytest.raises(H.InvalidInput):
        H.proof_from_json({"rule": "ax"})
