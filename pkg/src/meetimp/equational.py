"""The equational system E, its modal extension, and translations to and from H.

``a <= b`` abbreviates ``a & b = a`` throughout. Proof trees are built from
:class:`EqNode`; the builders below (``e1`` ... ``res_down``) construct single
steps and the helpers assemble the standard derived lemmas from them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import hilbert as H
from .order import FiniteSemilattice, ImplicativeWitness
from .syntax import TOP, And, Box, Formula, Imp, Letter, Mon, Top, apply_substitution, letters, parse, render


class InvalidInput(ValueError):
    pass


class NonEmptyContext(InvalidInput):
    pass


class UnboundLetter(KeyError):
    pass


@dataclass(frozen=True)
class Equation:
    lhs: Formula
    rhs: Formula

    def __str__(self):
        return f"{render(self.lhs)} = {render(self.rhs)}"


def leq(a: Formula, b: Formula) -> Equation:
    return Equation(And(a, b), a)


_a, _b, _c = Letter("a"), Letter("b"), Letter("c")

EQ_SCHEMAS: Dict[str, Equation] = {
    "e1": Equation(And(_a, And(_b, _c)), And(And(_a, _b), _c)),
    "e2": Equation(And(_a, _b), And(_b, _a)),
    "e3": Equation(And(_a, _a), _a),
    "e4": Equation(And(_a, TOP), _a),
    # Modal extension, used only for the modal systems.
    "b1": Equation(Box(And(_a, _b)), And(Box(_a), Box(_b))),
    "b2": Equation(Box(TOP), TOP),
    "m1": leq(Mon(And(_a, _b)), Mon(_a)),
}

BASE_RULES = ("e1", "e2", "e3", "e4", "ref", "sym", "trans", "cong&", "cong->", "res_up", "res_down")
MODAL_RULES = ("b1", "b2", "m1", "cong[]", "cong<m>")


@dataclass(frozen=True, eq=False)
class EqNode:
    rule: str
    concl: Equation
    kids: Tuple["EqNode", ...] = ()
    sub: Optional[Tuple[Tuple[str, Formula], ...]] = None

    def size(self) -> int:
        return 1 + sum(k.size() for k in self.kids)


@dataclass(frozen=True)
class EqReport:
    ok: bool
    path: Tuple[int, ...] = ()
    reason: str = ""

    def __bool__(self):
        return self.ok


# ---------------------------------------------------------------- single steps


def axiom(rule: str, **sub: Formula) -> EqNode:
    schema = EQ_SCHEMAS[rule]
    names = sorted(letters(schema.lhs) | letters(schema.rhs))
    s = {k: sub[k] for k in names}
    return EqNode(rule, Equation(apply_substitution(s, schema.lhs), apply_substitution(s, schema.rhs)), sub=tuple(s.items()))


def e1(a, b, c):
    return axiom("e1", a=a, b=b, c=c)


def e2(a, b):
    return axiom("e2", a=a, b=b)


def e3(a):
    return axiom("e3", a=a)


def e4(a):
    return axiom("e4", a=a)


def ref(a: Formula) -> EqNode:
    return EqNode("ref", Equation(a, a))


def sym(p: EqNode) -> EqNode:
    if p.rule == "sym":
        return p.kids[0]
    if p.rule == "ref":
        return p
    return EqNode("sym", Equation(p.concl.rhs, p.concl.lhs), (p,))


def trans(p: EqNode, q: EqNode) -> EqNode:
    if p.concl.rhs != q.concl.lhs:
        raise InvalidInput(f"trans: middle terms differ ({p.concl} / {q.concl})")
    if p.rule == "ref":
        return q
    if q.rule == "ref":
        return p
    return EqNode("trans", Equation(p.concl.lhs, q.concl.rhs), (p, q))


def chain(*steps: EqNode) -> EqNode:
    out = steps[0]
    for s in steps[1:]:
        out = trans(out, s)
    return out


def cong_and(p: EqNode, q: EqNode) -> EqNode:
    return EqNode("cong&", Equation(And(p.concl.lhs, q.concl.lhs), And(p.concl.rhs, q.concl.rhs)), (p, q))


def cong_imp(p: EqNode, q: EqNode) -> EqNode:
    return EqNode("cong->", Equation(Imp(p.concl.lhs, q.concl.lhs), Imp(p.concl.rhs, q.concl.rhs)), (p, q))


def cong_box(p: EqNode) -> EqNode:
    return EqNode("cong[]", Equation(Box(p.concl.lhs), Box(p.concl.rhs)), (p,))


def cong_mon(p: EqNode) -> EqNode:
    return EqNode("cong<m>", Equation(Mon(p.concl.lhs), Mon(p.concl.rhs)), (p,))


def _as_leq(e: Equation) -> Optional[Tuple[Formula, Formula]]:
    """Read ``x & y = x`` as ``x <= y``."""
    if isinstance(e.lhs, And) and e.lhs.left == e.rhs:
        return e.rhs, e.lhs.right
    return None


def res_up(p: EqNode) -> EqNode:
    """From ``a & b <= c`` infer ``a <= b -> c``."""
    pair = _as_leq(p.concl)
    if pair is None or not isinstance(pair[0], And):
        raise InvalidInput(f"res_up premise is not of the form a & b <= c: {p.concl}")
    (ab, c) = pair
    return EqNode("res_up", leq(ab.left, Imp(ab.right, c)), (p,))


def res_down(p: EqNode) -> EqNode:
    """From ``a <= b -> c`` infer ``a & b <= c``."""
    pair = _as_leq(p.concl)
    if pair is None or not isinstance(pair[1], Imp):
        raise InvalidInput(f"res_down premise is not of the form a <= b -> c: {p.concl}")
    a, bc = pair
    return EqNode("res_down", leq(And(a, bc.left), bc.right), (p,))


# ---------------------------------------------------------------- checking


def check_eq_proof(p: EqNode, modal: bool = True) -> EqReport:
    return _check(p, (), modal)


def _check(n: EqNode, path, modal: bool) -> EqReport:
    def fail(reason):
        return EqReport(False, path, reason)

    allowed = BASE_RULES + (MODAL_RULES if modal else ())
    if n.rule not in allowed:
        return fail(f"unknown or disallowed rule {n.rule!r}")
    arity = {"ref": 0, "sym": 1, "trans": 2, "cong&": 2, "cong->": 2, "res_up": 1, "res_down": 1, "cong[]": 1, "cong<m>": 1}
    want = arity.get(n.rule, 0)
    if len(n.kids) != want:
        return fail(f"{n.rule} expects {want} premises")
    e = n.concl
    ks = [k.concl for k in n.kids]
    if n.rule in EQ_SCHEMAS:
        schema = EQ_SCHEMAS[n.rule]
        sub = dict(n.sub or ())
        if not (letters(schema.lhs) | letters(schema.rhs)) <= set(sub):
            return fail("substitution does not cover the schema letters")
        if Equation(apply_substitution(sub, schema.lhs), apply_substitution(sub, schema.rhs)) != e:
            return fail(f"conclusion is not the stated instance of {n.rule}")
    elif n.rule == "ref":
        if e.lhs != e.rhs:
            return fail("ref needs identical sides")
    elif n.rule == "sym":
        if Equation(ks[0].rhs, ks[0].lhs) != e:
            return fail("sym conclusion is not the flipped premise")
    elif n.rule == "trans":
        if ks[0].rhs != ks[1].lhs:
            return fail("trans middle terms differ")
        if Equation(ks[0].lhs, ks[1].rhs) != e:
            return fail("trans conclusion does not match premises")
    elif n.rule in ("cong&", "cong->"):
        op = And if n.rule == "cong&" else Imp
        if Equation(op(ks[0].lhs, ks[1].lhs), op(ks[0].rhs, ks[1].rhs)) != e:
            return fail(f"{n.rule} conclusion does not match premises")
    elif n.rule in ("cong[]", "cong<m>"):
        op = Box if n.rule == "cong[]" else Mon
        if Equation(op(ks[0].lhs), op(ks[0].rhs)) != e:
            return fail(f"{n.rule} conclusion does not match premise")
    elif n.rule == "res_up":
        pair = _as_leq(ks[0])
        if pair is None or not isinstance(pair[0], And):
            return fail("res_up premise is not a & b <= c")
        ab, c = pair
        if e != leq(ab.left, Imp(ab.right, c)):
            return fail("res_up conclusion does not match premise")
    elif n.rule == "res_down":
        pair = _as_leq(ks[0])
        if pair is None or not isinstance(pair[1], Imp):
            return fail("res_down premise is not a <= b -> c")
        a, bc = pair
        if e != leq(And(a, bc.left), bc.right):
            return fail("res_down conclusion does not match premise")
    for i, k in enumerate(n.kids):
        r = _check(k, path + (i,), modal)
        if not r:
            return r
    return EqReport(True)


# ---------------------------------------------------------------- ACI normalisation


def _key(f: Formula) -> str:
    return render(f)


def _insert(a: Formula, y: Formula) -> Tuple[Formula, EqNode]:
    """``a & y = n`` where ``a`` is an atom and ``y`` is normal."""
    t = And(a, y)
    if isinstance(y, Top):
        return a, e4(a)
    if not isinstance(y, And):
        if a == y:
            return a, e3(a)
        if _key(a) < _key(y):
            return t, ref(t)
        return And(y, a), e2(a, y)
    y1, yr = y.left, y.right
    if a == y1:
        # a & (a & yr) = (a & a) & yr = a & yr
        return y, trans(e1(a, a, yr), cong_and(e3(a), ref(yr)))
    if _key(a) < _key(y1):
        return t, ref(t)
    # a & (y1 & yr) = (a & y1) & yr = (y1 & a) & yr = y1 & (a & yr) = y1 & n
    n, pn = _insert(a, yr)
    steps = chain(e1(a, y1, yr), cong_and(e2(a, y1), ref(yr)), sym(e1(y1, a, yr)))
    return And(y1, n), trans(steps, cong_and(ref(y1), pn))


def _merge(x: Formula, y: Formula) -> Tuple[Formula, EqNode]:
    """``x & y = n`` for normal ``x`` and ``y``."""
    if isinstance(y, Top):
        return x, e4(x)
    if isinstance(x, Top):
        return y, trans(e2(x, y), e4(y))
    if not isinstance(x, And):
        return _insert(x, y)
    x1, xr = x.left, x.right
    m, pm = _merge(xr, y)
    n, pn = _insert(x1, m)
    return n, chain(sym(e1(x1, xr, y)), cong_and(ref(x1), pm), pn)


def normalize(t: Formula) -> Tuple[Formula, EqNode]:
    """Normal form of ``t`` modulo associativity, commutativity, idempotence and unit,

    treating every non-conjunction as an atom, together with a proof ``t = nf``.
    """
    if not isinstance(t, And):
        return t, ref(t)
    nl, pl = normalize(t.left)
    nr, pr = normalize(t.right)
    n, pn = _merge(nl, nr)
    c = cong_and(pl, pr) if (pl.rule != "ref" or pr.rule != "ref") else ref(t)
    return n, trans(c, pn)


def aci_eq(lhs: Formula, rhs: Formula) -> EqNode:
    nl, pl = normalize(lhs)
    nr, pr = normalize(rhs)
    if nl != nr:
        raise InvalidInput(f"not an ACI identity: {render(lhs)} = {render(rhs)}")
    return trans(pl, sym(pr))


# ---------------------------------------------------------------- derived lemmas


def leq_top(a: Formula) -> EqNode:
    """``a <= T``, which is literally an E4 instance."""
    return e4(a)


def eq_from_leqs(p: EqNode, q: EqNode) -> EqNode:
    """From ``a <= b`` and ``b <= a`` derive ``a = b``."""
    a_b, b_a = _as_leq(p.concl), _as_leq(q.concl)
    if a_b is None or b_a is None or a_b != (b_a[1], b_a[0]):
        raise InvalidInput("eq_from_leqs needs a <= b and b <= a")
    a, b = a_b
    return chain(sym(p), e2(a, b), q)


def leqs_from_eq(p: EqNode) -> Tuple[EqNode, EqNode]:
    """From ``a = b`` derive ``a <= b`` and ``b <= a``."""
    a, b = p.concl.lhs, p.concl.rhs
    ab = trans(cong_and(ref(a), sym(p)), e3(a))
    ba = trans(cong_and(ref(b), p), e3(b))
    return ab, ba


def res3_1(a: Formula, b: Formula) -> EqNode:
    """``a & b = (a & b) & (a -> b)``."""
    ab = And(a, b)
    step1 = trans(sym(e1(ab, a, b)), e3(ab))  # ((a&b)&a)&b = a&b
    step2 = aci_eq(And(ab, a), ab)  # (a&b)&a = a&b
    premise = trans(step1, sym(step2))  # ((a&b)&a)&b = (a&b)&a
    return sym(res_up(premise))


def res3_2(a: Formula, b: Formula) -> EqNode:
    """``a & b = a & (a -> b)``."""
    ab, imp = And(a, b), Imp(a, b)
    refl, _ = leqs_from_eq(ref(imp))  # (a->b) <= (a->b)
    down = res_down(refl)  # ((a->b)&a)&b = (a->b)&a
    mid = chain(aci_eq(And(a, imp), And(imp, a)), sym(down), aci_eq(And(And(imp, a), b), And(ab, imp)))
    return trans(res3_1(a, b), sym(mid))


class LeqLemmas:
    leq_top = staticmethod(leq_top)
    eq_from_leqs = staticmethod(eq_from_leqs)
    leqs_from_eq = staticmethod(leqs_from_eq)
    res3_1 = staticmethod(res3_1)
    res3_2 = staticmethod(res3_2)
    aci_eq = staticmethod(aci_eq)


def derive_leq_lemmas() -> LeqLemmas:
    return LeqLemmas()


# ---------------------------------------------------------------- H to E


def _leq_from_chain(p: EqNode, c: Formula) -> EqNode:
    """Given ``L = R`` and an ACI proof of ``R <= c``, derive ``L <= c``."""
    L, R = p.concl.lhs, p.concl.rhs
    return chain(cong_and(p, ref(c)), aci_eq(And(R, c), R), sym(p))


def _top_leq_imp_from_leq(p: EqNode) -> EqNode:
    """From ``x <= y`` derive ``T <= x -> y``."""
    x, y = _as_leq(p.concl)
    premise = chain(aci_eq(And(And(TOP, x), y), And(TOP, And(x, y))), cong_and(ref(TOP), p))
    return res_up(premise)


def _eq_top(top_leq: EqNode) -> EqNode:
    """From ``T <= f`` derive ``f = T``."""
    f = _as_leq(top_leq.concl)[1]
    return eq_from_leqs(leq_top(f), top_leq)


def _iff_top_from_eq(p: EqNode) -> EqNode:
    """From ``x = y`` derive ``(x -> y) & (y -> x) = T``."""
    lx, ly = leqs_from_eq(p)
    f = _eq_top(_top_leq_imp_from_leq(lx))
    g = _eq_top(_top_leq_imp_from_leq(ly))
    return trans(cong_and(f, g), e3(TOP))


def _eq_from_iff_top(p: EqNode) -> EqNode:
    """From ``(x -> y) & (y -> x) = T`` derive ``x = y``."""
    conj = p.concl.lhs
    X, Y = conj.left, conj.right
    x, y = X.left, X.right

    def top_leq(part: Formula) -> EqNode:
        # T & part = (X & Y) & part = X & Y = T
        return chain(cong_and(sym(p), ref(part)), aci_eq(And(conj, part), conj), p)

    def side(t: EqNode, u: Formula, v: Formula) -> EqNode:
        # T <= u -> v gives T & u <= v, hence u <= v.
        down = res_down(t)  # (T & u) & v = T & u
        return chain(aci_eq(And(u, v), And(And(TOP, u), v)), down, aci_eq(And(TOP, u), u))

    return eq_from_leqs(side(top_leq(X), x, y), side(top_leq(Y), y, x))


def _h_axiom_to_eq(axiom_id: str, sub: Mapping[str, Formula], f: Formula) -> EqNode:
    if axiom_id == "H6":
        return ref(TOP)
    if axiom_id == "H1":
        a, b = sub["p"], sub["q"]
        ta = And(TOP, a)
        x = And(ta, b)
        terms = [
            x,
            And(And(a, TOP), b),
            And(a, b),
            And(b, a),
            And(b, And(a, a)),
            And(And(b, a), a),
            And(And(a, b), a),
            And(And(And(a, TOP), b), a),
            And(x, a),
        ]
        c = chain(*[aci_eq(terms[i], terms[i + 1]) for i in range(len(terms) - 1)])
        step = res_up(sym(c))  # T & a <= b -> a
        return _eq_top(res_up(step))
    if axiom_id == "H2":
        a, b, c = sub["p"], sub["q"], sub["r"]
        A, B = Imp(a, Imp(b, c)), Imp(a, b)
        bc = Imp(b, c)
        L = And(And(A, B), a)
        s1 = aci_eq(L, And(And(a, A), B))
        s2 = cong_and(sym(res3_2(a, bc)), ref(B))
        s3 = aci_eq(And(And(a, bc), B), And(And(a, B), bc))
        s4 = cong_and(sym(res3_2(a, b)), ref(bc))
        s5 = aci_eq(And(And(a, b), bc), And(a, And(b, bc)))
        s6 = cong_and(ref(a), sym(res3_2(b, c)))
        big = chain(s1, s2, s3, s4, s5, s6)  # L = a & (b & c)
        leq_c = _leq_from_chain(big, c)  # (A & B) & a <= c
        r1 = res_up(leq_c)  # A & B <= a -> c
        r2 = res_up(r1)  # A <= B -> (a -> c)
        g = Imp(B, Imp(a, c))
        premise = chain(aci_eq(And(And(TOP, A), g), And(TOP, And(A, g))), cong_and(ref(TOP), r2))
        return _eq_top(res_up(premise))
    if axiom_id in ("H3", "H4"):
        a, b = sub["p"], sub["q"]
        kept = a if axiom_id == "H3" else b
        t = And(TOP, And(a, b))
        return _eq_top(res_up(aci_eq(And(t, kept), t)))
    if axiom_id == "H5":
        a, b = sub["p"], sub["q"]
        ab = And(a, b)
        x = And(And(TOP, a), b)
        first = res_up(aci_eq(And(x, ab), x))  # T & a <= b -> a & b
        return _eq_top(res_up(first))
    if axiom_id == "B1":
        a, b = sub["p"], sub["q"]
        return _iff_top_from_eq(axiom("b1", a=a, b=b))
    if axiom_id == "B2":
        return _iff_top_from_eq(axiom("b2"))
    if axiom_id == "M1":
        a, b = sub["p"], sub["q"]
        return _eq_top(_top_leq_imp_from_leq(axiom("m1", a=a, b=b)))
    raise InvalidInput(f"unknown axiom {axiom_id!r}")


def hilbert_to_eq(p: H.HNode, sys: Optional[H.AxiomSet] = None) -> EqNode:
    """From ``⊢ f`` build an E-proof of ``f = T``."""
    if p.context:
        raise NonEmptyContext("hilbert_to_eq needs a proof from the empty context; apply deduction first")
    try:
        H._require(p, sys)
    except H.InvalidInput as exc:
        raise InvalidInput(str(exc)) from exc
    return _h2e(p)


def _h2e(n: H.HNode) -> EqNode:
    if n.rule == "ax":
        return _h_axiom_to_eq(n.axiom, n.substitution, n.conclusion)
    if n.rule == "mp":
        minor, major = n.kids
        e, f = minor.conclusion, n.conclusion
        pe = _h2e(minor)  # e = T
        pef = _h2e(major)  # (e -> f) = T
        top_eq = trans(sym(pef), cong_imp(pe, ref(f)))  # T = T -> f
        le, _ = leqs_from_eq(top_eq)  # T <= T -> f
        down = res_down(le)  # (T & T) & f = T & T
        top_leq_f = chain(cong_and(sym(e3(TOP)), ref(f)), down, e3(TOP))  # T & f = T
        return _eq_top(top_leq_f)
    if n.rule == "cong":
        (k,) = n.kids
        inner = _eq_from_iff_top(_h2e(k))
        lifted = cong_box(inner) if n.modality == "box" else cong_mon(inner)
        return _iff_top_from_eq(lifted)
    raise NonEmptyContext("assumption inside a theorem proof")


# ---------------------------------------------------------------- E to H


def eq_to_hilbert(p: EqNode) -> Tuple[H.HNode, H.HNode]:
    """From ``E ⊢ a = b`` build ``⊢ a → b`` and ``⊢ b → a``."""
    r = check_eq_proof(p)
    if not r:
        raise InvalidInput(f"equational proof does not check at {list(r.path)}: {r.reason}")
    return _e2h(p)


def _ded(p, a):
    return H.deduction(p, a, check=False)


def _undo(p):
    return H.undeduction(p, check=False)


def _wk(p, a):
    return H.weaken(p, a, check=False)


def _ci(p, q):
    return H.conj_intro(p, q, check=False)


def _cc(p, a, b):
    return H.conj_context(p, a, b, check=False)


def _e2h(n: EqNode) -> Tuple[H.HNode, H.HNode]:
    e = n.concl
    sub = dict(n.sub or ())
    if n.rule == "e1":
        a, b, c = sub["a"], sub["b"], sub["c"]
        ctx = (a, b, c)
        fwd = _ci(_ci(H.ass(ctx, a), H.ass(ctx, b)), H.ass(ctx, c))  # a, b, c ⊢ (a&b)&c
        fwd = _cc(_cc(fwd, b, c), a, And(b, c))  # a & (b & c) ⊢ ...
        bwd = _ci(H.ass(ctx, a), _ci(H.ass(ctx, b), H.ass(ctx, c)))  # a, b, c ⊢ a&(b&c)
        bwd = _cc(_cc(bwd, a, b), And(a, b), c)
        return _ded(fwd, e.lhs), _ded(bwd, e.rhs)

    if n.rule == "e2":
        a, b = sub["a"], sub["b"]

        def swap(x, y):
            pr = _ci(H.ass((x, y), y), H.ass((x, y), x))  # x, y ⊢ y & x
            return _ded(_cc(pr, x, y), And(x, y))

        return swap(a, b), swap(b, a)

    if n.rule == "e3":
        a = sub["a"]
        fwd = H.ax((), "H3", {"p": a, "q": a})
        bwd = _ded(_ci(H.ass((a,), a), H.ass((a,), a)), a)
        return fwd, bwd

    if n.rule == "e4":
        a = sub["a"]
        fwd = H.ax((), "H3", {"p": a, "q": TOP})
        bwd = _ded(_ci(H.ass((a,), a), H.ax((a,), "H6", {})), a)
        return fwd, bwd

    if n.rule == "ref":
        return H.prove_identity(e.lhs), H.prove_identity(e.lhs)

    if n.rule == "sym":
        f, g = _e2h(n.kids[0])
        return g, f

    if n.rule == "trans":
        (ab, ba), (bc, cb) = _e2h(n.kids[0]), _e2h(n.kids[1])
        a, c = e.lhs, e.rhs

        return H.syllogism(ab, bc, check=False), H.syllogism(cb, ba, check=False)

    if n.rule == "cong&":
        (f1, g1), (f2, g2) = _e2h(n.kids[0]), _e2h(n.kids[1])

        def both(p1, p2, x1, x2):
            # x1 ⊢ y1 and x2 ⊢ y2 weaken to x1, x2; conj and discharge.
            q1 = _wk(_undo(p1), x2)
            q2 = _wk(_undo(p2), x1)
            pr = _ci(q1, q2)
            return _ded(_cc(pr, x1, x2), And(x1, x2))

        a1, a2 = e.lhs.left, e.lhs.right
        b1, b2 = e.rhs.left, e.rhs.right
        return both(f1, f2, a1, a2), both(g1, g2, b1, b2)

    if n.rule == "cong->":
        (f1, g1), (f2, g2) = _e2h(n.kids[0]), _e2h(n.kids[1])
        a1, b1 = e.lhs.left, e.lhs.right
        a2, b2 = e.rhs.left, e.rhs.right

        def table(imp_src, x_new, back_x, fwd_y):
            # Γ = imp_src, x_new where imp_src = x_old -> y_old.
            ctx = (imp_src, x_new)
            l1 = _wk(_wk(back_x, imp_src), x_new)  # Γ ⊢ x_new -> x_old
            l2 = H.mp(H.ass(ctx, x_new), l1)  # Γ ⊢ x_old
            l3 = H.mp(l2, H.ass(ctx, imp_src))  # Γ ⊢ y_old
            l4 = _wk(_wk(fwd_y, imp_src), x_new)  # Γ ⊢ y_old -> y_new
            l5 = H.mp(l3, l4)  # Γ ⊢ y_new
            return _ded(_ded(l5, x_new), imp_src)

        fwd = table(e.lhs, a2, g1, f2)  # uses a2 -> a1 and b1 -> b2
        bwd = table(e.rhs, a1, f1, g2)  # uses a1 -> a2 and b2 -> b1
        return fwd, bwd

    if n.rule == "res_up":
        # premise (a & b) & c = a & b ; conclusion a & (b -> c) = a
        _, back = _e2h(n.kids[0])  # ⊢ a & b -> (a & b) & c
        ab = n.kids[0].concl.rhs
        a, b = ab.left, ab.right
        bc = e.lhs.right
        fwd = H.ax((), "H3", {"p": a, "q": bc})
        s = H.conj_uncontext(_undo(back), a, b, check=False)  # a, b ⊢ (a & b) & c
        _, c_pf = H.conj_split(s, check=False)  # a, b ⊢ c
        d = _ded(c_pf, b)  # a ⊢ b -> c
        if a not in d.context:  # a and b coincide
            d = _wk(d, a)
        bwd = _ded(_ci(H.ass(d.context, a), d), a)
        return fwd, bwd

    if n.rule == "res_down":
        # premise a & (b -> c) = a ; conclusion (a & b) & c = a & b
        _, back = _e2h(n.kids[0])  # ⊢ a -> a & (b -> c)
        a = e.rhs.left
        b = e.rhs.right
        c = e.lhs.right
        ab = e.rhs
        fwd = H.ax((), "H3", {"p": ab, "q": c})
        _, bc_pf = H.conj_split(_undo(back), check=False)  # a ⊢ b -> c
        c_pf = _cc(_undo(bc_pf), a, b)  # a & b ⊢ c
        bwd = _ded(_ci(H.ass(c_pf.context, ab), c_pf), ab)
        return fwd, bwd

    if n.rule in ("b1", "b2"):
        a_id = "B1" if n.rule == "b1" else "B2"
        hs = {"p": sub["a"], "q": sub["b"]} if n.rule == "b1" else {}
        return H.conj_split(H.ax((), a_id, hs), check=False)

    if n.rule == "m1":
        x = e.rhs  # <m>(a & b)
        y = e.lhs.right  # <m>a
        fwd = H.ax((), "H3", {"p": x, "q": y})
        m1 = H.ax((x,), "M1", {"p": sub["a"], "q": sub["b"]})
        bwd = _ded(_ci(H.ass((x,), x), H.mp(H.ass((x,), x), m1)), x)
        return fwd, bwd

    if n.rule in ("cong[]", "cong<m>"):
        f, g = _e2h(n.kids[0])
        both = H.conj_intro(f, g, check=False)
        lifted = H.cong(both, "box" if n.rule == "cong[]" else "mon")
        return H.conj_split(lifted, check=False)

    raise InvalidInput(f"unknown rule {n.rule!r}")


def eq_to_hilbert_theorem(p: EqNode) -> H.HNode:
    """From ``E ⊢ a = T`` build ``⊢ a`` (via ``⊢ T → a`` and H6)."""
    if p.concl.rhs != TOP:
        raise InvalidInput("expected an equation of the form a = T")
    _, back = eq_to_hilbert(p)
    return H.mp(H.ax((), "H6", {}), back)


# ---------------------------------------------------------------- algebraic semantics


def eval_term(
    A: FiniteSemilattice,
    imp: ImplicativeWitness,
    f: Formula,
    env: Mapping[str, int],
    box: Optional[Sequence[int]] = None,
    mon: Optional[Sequence[int]] = None,
) -> int:
    if isinstance(f, Top):
        return A.top
    if isinstance(f, Letter):
        if f.name not in env:
            raise UnboundLetter(f.name)
        return env[f.name]
    if isinstance(f, And):
        return A.meet(eval_term(A, imp, f.left, env, box, mon), eval_term(A, imp, f.right, env, box, mon))
    if isinstance(f, Imp):
        return imp(eval_term(A, imp, f.left, env, box, mon), eval_term(A, imp, f.right, env, box, mon))
    table = box if isinstance(f, Box) else mon
    if table is None:
        raise InvalidInput(f"no operator table for {type(f).__name__}")
    return table[eval_term(A, imp, f.body, env, box, mon)]


def eval_equation_in_algebra(
    A: FiniteSemilattice,
    imp: ImplicativeWitness,
    e: Equation,
    env: Mapping[str, int],
    box: Optional[Sequence[int]] = None,
    mon: Optional[Sequence[int]] = None,
) -> bool:
    return eval_term(A, imp, e.lhs, env, box, mon) == eval_term(A, imp, e.rhs, env, box, mon)


# ---------------------------------------------------------------- JSON


def eq_proof_to_json(n: EqNode) -> dict:
    out = {"rule": n.rule, "lhs": render(n.concl.lhs), "rhs": render(n.concl.rhs)}
    if n.rule in EQ_SCHEMAS:
        out["sub"] = {k: render(v) for k, v in (n.sub or ())}
    out["kids"] = [eq_proof_to_json(k) for k in n.kids]
    return out


def eq_proof_from_json(obj) -> EqNode:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        sub = obj.get("sub")
        return EqNode(
            obj["rule"],
            Equation(parse(obj["lhs"]), parse(obj["rhs"])),
            tuple(eq_proof_from_json(k) for k in obj.get("kids", [])),
            tuple(sorted((k, parse(v)) for k, v in sub.items())) if sub is not None else None,
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise InvalidInput(f"malformed equational proof node: {exc}") from exc
