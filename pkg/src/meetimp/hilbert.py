"""Hilbert-style proofs for MI and its two modal extensions.

A proof is a tree of :class:`HNode`. Every node carries its own context, so a
subtree is itself a proof. Contexts are duplicate-free tuples compared as sets.

The transformation functions (``weaken``, ``deduction``, ``conj_context`` ...)
are the constructive content of the usual structural lemmas: each returns a new
proof that :func:`check_proof` accepts whenever the input did.
"""

from __future__ import annotations

import json
import weakref
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .syntax import (
    TOP,
    And,
    Box,
    Formula,
    Imp,
    Letter,
    Mon,
    apply_substitution,
    depth,
    formulas_up_to_depth,
    iff,
    letters,
    match_schema,
    parse,
    render,
)


class InvalidInput(ValueError):
    """A proof handed to a transformation does not check."""


class BudgetExceeded(RuntimeError):
    pass


_p, _q, _r = Letter("p"), Letter("q"), Letter("r")

SCHEMAS: Dict[str, Formula] = {
    "H1": Imp(_p, Imp(_q, _p)),
    "H2": Imp(Imp(_p, Imp(_q, _r)), Imp(Imp(_p, _q), Imp(_p, _r))),
    "H3": Imp(And(_p, _q), _p),
    "H4": Imp(And(_p, _q), _q),
    "H5": Imp(_p, Imp(_q, And(_p, _q))),
    "H6": TOP,
    "B1": iff(Box(And(_p, _q)), And(Box(_p), Box(_q))),
    "B2": iff(Box(TOP), TOP),
    "M1": Imp(Mon(And(_p, _q)), Mon(_p)),
}

_MODALITY = {"box": Box, "mon": Mon}


@dataclass(frozen=True)
class AxiomSet:
    tag: str
    axioms: Tuple[str, ...]
    modalities: Tuple[str, ...]

    def schema(self, axiom_id: str) -> Formula:
        return SCHEMAS[axiom_id]

    @property
    def schemas(self) -> List[Tuple[str, Formula]]:
        return [(a, SCHEMAS[a]) for a in self.axioms]


MI = AxiomSet("MI", ("H1", "H2", "H3", "H4", "H5", "H6"), ())
MI_BOX = AxiomSet("MI_Box", MI.axioms + ("B1", "B2"), ("box",))
MI_MON = AxiomSet("MI_Mon", MI.axioms + ("M1",), ("mon",))
SYSTEMS = {"mi": MI, "mibox": MI_BOX, "mimon": MI_MON}


def system(name: str) -> AxiomSet:
    try:
        return SYSTEMS[name.lower().replace("_", "")]
    except KeyError:
        raise ValueError(f"unknown system {name!r}; expected one of {sorted(SYSTEMS)}") from None


Context = Tuple[Formula, ...]


@dataclass(frozen=True, eq=False)
class HNode:
    context: Context
    conclusion: Formula
    rule: str  # "ass" | "ax" | "mp" | "cong"
    axiom: Optional[str] = None
    sub: Optional[Tuple[Tuple[str, Formula], ...]] = None
    kids: Tuple["HNode", ...] = ()
    modality: Optional[str] = None

    @property
    def substitution(self) -> Dict[str, Formula]:
        return dict(self.sub or ())

    def size(self) -> int:
        return 1 + sum(k.size() for k in self.kids)


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    path: Tuple[int, ...] = ()
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _ctx(items: Iterable[Formula]) -> Context:
    out: List[Formula] = []
    for f in items:
        if f not in out:
            out.append(f)
    return tuple(out)


# ---------------------------------------------------------------- constructors


def ass(context: Sequence[Formula], a: Formula) -> HNode:
    return HNode(_ctx(context), a, "ass")


def ax(context: Sequence[Formula], axiom_id: str, sub: Mapping[str, Formula]) -> HNode:
    schema = SCHEMAS[axiom_id]
    used = {k: sub[k] for k in sorted(letters(schema))}
    return HNode(_ctx(context), apply_substitution(used, schema), "ax", axiom_id, tuple(used.items()))


def mp(minor: HNode, major: HNode) -> HNode:
    """From ``Γ ⊢ φ`` and ``Γ ⊢ φ → ψ`` conclude ``Γ ⊢ ψ``; context taken from ``minor``."""
    if not isinstance(major.conclusion, Imp):
        raise InvalidInput(f"major premise is not an implication: {render(major.conclusion)}")
    return HNode(minor.context, major.conclusion.right, "mp", kids=(minor, major))


def cong(child: HNode, modality: str, context: Sequence[Formula] = ()) -> HNode:
    c = child.conclusion
    if not (isinstance(c, And) and isinstance(c.left, Imp) and isinstance(c.right, Imp)):
        raise InvalidInput("cong needs a premise of the form φ <-> ψ")
    phi, psi = c.left.left, c.left.right
    op = _MODALITY[modality]
    return HNode(_ctx(context), iff(op(phi), op(psi)), "cong", kids=(child,), modality=modality)


# ---------------------------------------------------------------- checking


def check_proof(sys: AxiomSet, p: HNode) -> CheckReport:
    return _check(sys, p, ())


def _check(sys: AxiomSet, n: HNode, path: Tuple[int, ...]) -> CheckReport:
    def fail(reason: str) -> CheckReport:
        return CheckReport(False, path, reason)

    ctx = set(n.context)
    if n.rule == "ass":
        if n.kids:
            return fail("ass node has premises")
        if n.conclusion not in ctx:
            return fail(f"assumption {render(n.conclusion)} not in context")
        return CheckReport(True)
    if n.rule == "ax":
        if n.kids:
            return fail("ax node has premises")
        if n.axiom not in sys.axioms:
            return fail(f"axiom {n.axiom!r} not available in {sys.tag}")
        sub = n.substitution
        schema = SCHEMAS[n.axiom]
        if not letters(schema) <= set(sub):
            return fail("substitution does not cover the schema letters")
        if apply_substitution(sub, schema) != n.conclusion:
            return fail(f"conclusion is not the stated instance of {n.axiom}")
        return CheckReport(True)
    if n.rule == "mp":
        if len(n.kids) != 2:
            return fail("mp needs exactly two premises")
        minor, major = n.kids
        if set(minor.context) != ctx or set(major.context) != ctx:
            return fail("mp premises do not share the node's context")
        if major.conclusion != Imp(minor.conclusion, n.conclusion):
            return fail("minor premise does not match the antecedent of the major premise")
        for i, k in enumerate(n.kids):
            r = _check(sys, k, path + (i,))
            if not r:
                return r
        return CheckReport(True)
    if n.rule == "cong":
        if n.modality not in sys.modalities:
            return fail(f"cong for {n.modality!r} not available in {sys.tag}")
        if len(n.kids) != 1:
            return fail("cong needs exactly one premise")
        (k,) = n.kids
        if k.context:
            return fail("cong applies to theorems only (premise context must be empty)")
        c = k.conclusion
        if not (isinstance(c, And) and isinstance(c.left, Imp) and c.right == Imp(c.left.right, c.left.left)):
            return fail("cong premise is not a biconditional")
        op = _MODALITY[n.modality]
        if n.conclusion != iff(op(c.left.left), op(c.left.right)):
            return fail("cong conclusion does not match its premise")
        return _check(sys, k, path + (0,))
    return fail(f"unknown rule {n.rule!r}")


def infer_system(p: HNode) -> AxiomSet:
    """The smallest of MI, MI_Box, MI_Mon whose rules cover the proof (MI_Box if both modalities appear)."""
    axioms, mods = set(), set()
    stack = [p]
    while stack:
        n = stack.pop()
        if n.rule == "ax":
            axioms.add(n.axiom)
        if n.rule == "cong":
            mods.add(n.modality)
        stack.extend(n.kids)
    if "mon" in mods or axioms & {"M1"}:
        return MI_MON
    if "box" in mods or axioms & {"B1", "B2"}:
        return MI_BOX
    return MI


def _require(p: HNode, sys: Optional[AxiomSet] = None) -> AxiomSet:
    sys = sys or infer_system(p)
    r = check_proof(sys, p)
    if not r:
        raise InvalidInput(f"proof does not check at {list(r.path)}: {r.reason}")
    return sys


# ---------------------------------------------------------------- transformations


def prove_identity(a: Formula, context: Sequence[Formula] = ()) -> HNode:
    """``Γ ⊢ a → a`` from two H1 instances, one H2 instance and two mp steps."""
    aa = Imp(a, a)
    l1 = ax(context, "H2", {"p": a, "q": aa, "r": a})
    l2 = ax(context, "H1", {"p": a, "q": aa})
    l3 = ax(context, "H1", {"p": a, "q": a})
    l4 = mp(l2, l1)
    return mp(l3, l4)


# Re-contexted copies remember their source so that moving a subtree back to an
# earlier context (weaken, then discharge) returns the original instead of copying.
_ORIGIN: "weakref.WeakKeyDictionary[HNode, HNode]" = weakref.WeakKeyDictionary()


def _with_context(n: HNode, context: Context, memo: Optional[Dict[int, HNode]] = None) -> HNode:
    if n.context == context:
        return n
    if memo is None:
        memo = {}
    hit = memo.get(id(n))
    if hit is not None:
        return hit
    o = _ORIGIN.get(n)
    while o is not None:
        if o.context == context:
            memo[id(n)] = o
            return o
        o = _ORIGIN.get(o)
    if n.rule == "mp":
        out = HNode(context, n.conclusion, "mp", kids=tuple(_with_context(k, context, memo) for k in n.kids))
    else:
        out = HNode(context, n.conclusion, n.rule, n.axiom, n.sub, n.kids, n.modality)
    _ORIGIN[out] = n
    memo[id(n)] = out
    return out


def weaken(p: HNode, extra: Formula, check: bool = True) -> HNode:
    if check:
        _require(p)
    return _with_context(p, _ctx(p.context + (extra,)))


def _lift(n: HNode, a: Formula) -> HNode:
    """From ``Γ ⊢ b`` build ``Γ ⊢ a → b`` with H1 and mp."""
    h1 = ax(n.context, "H1", {"p": n.conclusion, "q": a})
    return mp(n, h1)


def _uses(n: HNode, a: Formula, memo: Dict[int, bool]) -> bool:
    key = id(n)
    if key not in memo:
        if n.rule == "ass":
            memo[key] = n.conclusion == a
        elif n.rule == "mp":
            memo[key] = _uses(n.kids[0], a, memo) or _uses(n.kids[1], a, memo)
        else:
            memo[key] = False
    return memo[key]


def _discharge(n: HNode, a: Formula, gamma: Context, memo: Dict[int, bool]) -> HNode:
    if n.rule == "ass" and n.conclusion == a:
        return prove_identity(a, gamma)
    if not _uses(n, a, memo):
        # Subtrees that never cite ``a`` are handled like the axiom case:
        # re-home them in Γ and prefix a → with H1 and mp.
        return _lift(_with_context(n, gamma), a)
    minor, major = n.kids
    c, b = minor.conclusion, n.conclusion
    d_minor = _discharge(minor, a, gamma, memo)  # Γ ⊢ a → c
    d_major = _discharge(major, a, gamma, memo)  # Γ ⊢ a → (c → b)
    h2 = ax(gamma, "H2", {"p": a, "q": c, "r": b})
    return mp(d_minor, mp(d_major, h2))


def deduction(p: HNode, a: Formula, check: bool = True) -> HNode:
    """From ``Γ, a ⊢ b`` build ``Γ ⊢ a → b``."""
    if check:
        _require(p)
    gamma = tuple(f for f in p.context if f != a)
    return _discharge(p, a, gamma, {})


def undeduction(p: HNode, check: bool = True) -> HNode:
    """From ``Γ ⊢ a → b`` build ``Γ, a ⊢ b``."""
    if check:
        _require(p)
    if not isinstance(p.conclusion, Imp):
        raise InvalidInput("undeduction needs an implication")
    a = p.conclusion.left
    w = weaken(p, a, check=False)
    return mp(ass(w.context, a), w)


def syllogism(p: HNode, q: HNode, check: bool = True) -> HNode:
    """From ``Γ ⊢ x → y`` and ``Γ ⊢ y → z`` build ``Γ ⊢ x → z`` (H1, H2 and three mp)."""
    if check:
        _require(p)
        _require(q)
    if not (isinstance(p.conclusion, Imp) and isinstance(q.conclusion, Imp)) or p.conclusion.right != q.conclusion.left:
        raise InvalidInput("syllogism needs x -> y and y -> z")
    x, y, z = p.conclusion.left, p.conclusion.right, q.conclusion.right
    q = _with_context(q, p.context)
    lifted = mp(q, ax(p.context, "H1", {"p": q.conclusion, "q": x}))  # Γ ⊢ x → (y → z)
    h2 = ax(p.context, "H2", {"p": x, "q": y, "r": z})
    return mp(p, mp(lifted, h2))


def conj_intro(p: HNode, q: HNode, check: bool = True) -> HNode:
    if check:
        _require(p)
        _require(q)
    if set(p.context) != set(q.context):
        raise InvalidInput("conj_intro needs proofs over the same context")
    a, b = p.conclusion, q.conclusion
    q = _with_context(q, p.context)
    h5 = ax(p.context, "H5", {"p": a, "q": b})
    return mp(q, mp(p, h5))


def conj_split(p: HNode, check: bool = True) -> Tuple[HNode, HNode]:
    if check:
        _require(p)
    c = p.conclusion
    if not isinstance(c, And):
        raise InvalidInput("conj_split needs a conjunction")
    sub = {"p": c.left, "q": c.right}
    return mp(p, ax(p.context, "H3", sub)), mp(p, ax(p.context, "H4", sub))


def conj_context(p: HNode, a: Formula, b: Formula, check: bool = True) -> HNode:
    """From ``Γ, a, b ⊢ c`` build ``Γ, a ∧ b ⊢ c``."""
    if check:
        _require(p)
    ab = And(a, b)
    d = deduction(deduction(p, b, check=False), a, check=False)  # Γ ⊢ a → (b → c)
    d = weaken(d, ab, check=False)
    left, right = conj_split(ass(d.context, ab), check=False)
    return mp(right, mp(left, d))


def conj_uncontext(p: HNode, a: Formula, b: Formula, check: bool = True) -> HNode:
    """From ``Γ, a ∧ b ⊢ c`` build ``Γ, a, b ⊢ c``."""
    if check:
        _require(p)
    ab = And(a, b)
    d = deduction(p, ab, check=False)  # Γ ⊢ a ∧ b → c
    d = weaken(weaken(d, a, check=False), b, check=False)
    both = conj_intro(ass(d.context, a), ass(d.context, b), check=False)
    return mp(both, d)


# ---------------------------------------------------------------- theorem sampler


@dataclass
class Theorems:
    formulas: List[Formula]
    proofs: Dict[Formula, HNode]
    partial: bool = False

    def __contains__(self, f) -> bool:
        return f in self.proofs

    def __iter__(self):
        return iter(self.formulas)

    def __len__(self):
        return len(self.formulas)


def axiom_instances(sys: AxiomSet, pool: Sequence[Formula], max_depth: int):
    """All instances of the system's axioms with metavariables drawn from ``pool``."""
    for axiom_id in sys.axioms:
        schema = SCHEMAS[axiom_id]
        names = sorted(letters(schema))
        slots = [[]]
        for _ in names:
            slots = [s + [f] for s in slots for f in pool]
        for choice in slots:
            sub = dict(zip(names, choice))
            inst = apply_substitution(sub, schema)
            if depth(inst) <= max_depth:
                yield axiom_id, sub, inst


def enumerate_theorems(
    sys: AxiomSet,
    letter_names: Sequence[str],
    depth_bound: int = 3,
    budget: int = 20000,
    pool_depth: Optional[int] = None,
    search_depth: Optional[int] = None,
) -> Theorems:
    """A deterministic sample of theorems of ``sys`` with a proof for each.

    Axiom instances are built from the pool of formulas of depth <= ``pool_depth``
    (default ``depth_bound - 2``). The set is saturated under mp, conjunction
    splitting and cong while formulas stay within ``search_depth`` (default
    ``depth_bound + 2``). Only theorems of depth <= ``depth_bound`` are emitted.
    Stops early once ``budget`` facts are known and flags the result as partial.
    """
    if pool_depth is None:
        pool_depth = max(0, depth_bound - 2)
    if search_depth is None:
        search_depth = depth_bound + 2
    mods = tuple(_MODALITY[m] for m in sys.modalities)
    pool = formulas_up_to_depth(letter_names, pool_depth, mods)
    proofs: Dict[Formula, HNode] = {}
    order: List[Formula] = []
    by_antecedent: Dict[Formula, List[Formula]] = defaultdict(list)
    partial = False
    queue: List[Formula] = []

    def add(f: Formula, proof: HNode) -> bool:
        nonlocal partial
        if f in proofs or depth(f) > search_depth:
            return True
        if len(proofs) >= budget:
            partial = True
            return False
        proofs[f] = proof
        order.append(f)
        queue.append(f)
        return True

    for axiom_id, sub, inst in axiom_instances(sys, pool, search_depth):
        if not add(inst, ax((), axiom_id, sub)):
            break

    head = 0
    while head < len(queue) and not partial:
        f = queue[head]
        head += 1
        pf = proofs[f]
        if isinstance(f, Imp):
            by_antecedent[f.left].append(f)
            if f.left in proofs:
                if not add(f.right, mp(proofs[f.left], pf)):
                    break
        for g in list(by_antecedent.get(f, ())):
            if not add(g.right, mp(pf, proofs[g])):
                break
        if isinstance(f, And):
            l, r = conj_split(pf, check=False)
            add(f.left, l)
            add(f.right, r)
            if isinstance(f.left, Imp) and f.right == Imp(f.left.right, f.left.left):
                for m in sys.modalities:
                    c = cong(pf, m)
                    add(c.conclusion, c)
    emitted = [f for f in order if depth(f) <= depth_bound]
    return Theorems(emitted, {f: proofs[f] for f in emitted}, partial)


# ---------------------------------------------------------------- JSON


def proof_to_json(n: HNode) -> dict:
    out = {"rule": n.rule, "ctx": [render(f) for f in n.context], "concl": render(n.conclusion)}
    if n.rule == "ax":
        out["axiom"] = n.axiom
        out["sub"] = {k: render(v) for k, v in (n.sub or ())}
    if n.rule == "cong":
        out["modality"] = n.modality
    out["kids"] = [proof_to_json(k) for k in n.kids]
    return out


def proof_from_json(obj) -> HNode:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        rule = obj["rule"]
        ctx = _ctx(parse(s) for s in obj.get("ctx", []))
        concl = parse(obj["concl"])
        kids = tuple(proof_from_json(k) for k in obj.get("kids", []))
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"malformed proof node: {exc}") from exc
    if rule == "ax":
        sub = tuple(sorted((k, parse(v)) for k, v in obj.get("sub", {}).items()))
        return HNode(ctx, concl, "ax", obj.get("axiom"), sub, kids)
    if rule == "cong":
        modality = obj.get("modality")
        if modality is None:
            modality = "mon" if isinstance(concl, And) and isinstance(concl.left, Imp) and isinstance(concl.left.left, Mon) else "box"
        return HNode(ctx, concl, "cong", kids=kids, modality=modality)
    return HNode(ctx, concl, rule, kids=kids)
