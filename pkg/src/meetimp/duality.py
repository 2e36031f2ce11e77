"""Finite duality between modal frames and algebras, filter extensions, and equivalences.

Two different semilattice views live on the filters of an algebra ``A``:

* ``F(A)`` with inclusion, intersection and top ``A`` is used whenever the
  filters serve as *worlds* of a frame (``dual_frame``, complex algebras);
* the same filters under *reverse* inclusion carry the pointwise meet and are
  the values of the box structure map ``x ↦ R[x]``.

Everything here is finite, so every filter is principal and also "clopen":
the closed and arbitrary tiers of the monotone constructions are computed
literally and then collapse onto the clopen tier.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Callable, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from .order import (
    Filter,
    FilterSemilattice,
    FiniteSemilattice,
    ImplicativeWitness,
    build_filter_semilattice,
    implication_set,
    implicative_witness,
    is_filter_set,
    semilattice_from_json,
    semilattice_to_json,
    up_sets,
)
from .semantics import (
    BoxFrame,
    ElemSet,
    Frame,
    IFrame,
    Model,
    MonFrame,
    den_box,
    den_imp,
    den_mon,
    iframe,
    morphism_failure,
    preimage,
)
from .syntax import Box, Mon


class DualityError(ValueError):
    pass


class NotISLO(DualityError):
    pass


class NotIso(DualityError):
    def __init__(self, condition: str, witness=None):
        super().__init__(f"isomorphism check failed: {condition} ({witness})")
        self.condition = condition
        self.witness = witness


class BoundTooSmall(DualityError):
    pass


# ---------------------------------------------------------------- algebras


@dataclass(frozen=True, eq=False)
class ISLO:
    algebra: FiniteSemilattice
    imp: ImplicativeWitness
    box: Tuple[int, ...]
    labels: Optional[Tuple[ElemSet, ...]] = None  # element sets when the carrier is a filter algebra


@dataclass(frozen=True, eq=False)
class MonAlgebra:
    algebra: FiniteSemilattice
    imp: ImplicativeWitness
    mon: Tuple[int, ...]
    labels: Optional[Tuple[ElemSet, ...]] = None


def _witness(A: FiniteSemilattice) -> ImplicativeWitness:
    w = implicative_witness(A)
    if w is None:
        raise NotISLO("underlying semilattice is not implicative")
    return w


def validate_islo(A: FiniteSemilattice, box: Sequence[int]) -> ISLO:
    box = tuple(int(b) for b in box)
    if len(box) != A.size or any(not 0 <= b < A.size for b in box):
        raise NotISLO("box table has the wrong shape")
    if box[A.top] != A.top:
        raise NotISLO("box does not preserve top")
    for a, b in product(A.elements, repeat=2):
        if box[A.meet(a, b)] != A.meet(box[a], box[b]):
            raise NotISLO(f"box does not preserve the meet of {a} and {b}")
    return ISLO(A, _witness(A), box)


def validate_mon_algebra(A: FiniteSemilattice, mon: Sequence[int]) -> MonAlgebra:
    mon = tuple(int(m) for m in mon)
    if len(mon) != A.size or any(not 0 <= m < A.size for m in mon):
        raise NotISLO("mon table has the wrong shape")
    for a, b in product(A.elements, repeat=2):
        if not A.le(mon[A.meet(a, b)], mon[a]):
            raise NotISLO(f"mon(a & b) <= mon(a) fails for {a}, {b}")
    return MonAlgebra(A, _witness(A), mon)


def islo_to_json(a: ISLO) -> dict:
    return {**semilattice_to_json(a.algebra), "box": list(a.box)}


def islo_from_json(obj) -> ISLO:
    return validate_islo(semilattice_from_json(obj), obj["box"])


def mon_algebra_from_json(obj) -> MonAlgebra:
    return validate_mon_algebra(semilattice_from_json(obj), obj["mon"])


def box_tables(A: FiniteSemilattice) -> List[Tuple[int, ...]]:
    """Every top- and meet-preserving unary table on ``A``."""
    from .order import homomorphisms

    return homomorphisms(A, A)


def mon_tables(A: FiniteSemilattice) -> List[Tuple[int, ...]]:
    """Every monotone unary table on ``A`` (monotone iff ``mon(a & b) <= mon(a)``)."""
    out = []
    for t in product(A.elements, repeat=A.size):
        if all(A.le(t[x], t[y]) for x in A.elements for y in A.up(x)):
            out.append(t)
    return out


# ---------------------------------------------------------------- dialgebra view of frames


def wedge(A: FiniteSemilattice, a: ElemSet, b: ElemSet) -> ElemSet:
    """Meet in the reverse-inclusion order on filters: the least filter containing both."""
    from .order import filter_closure

    return filter_closure(A, set(a) | set(b)).elements


def wedge_pointwise(A: FiniteSemilattice, a: ElemSet, b: ElemSet) -> ElemSet:
    return frozenset(A.meet(y, z) for y in a for z in b)


@dataclass(frozen=True, eq=False)
class Dialgebra:
    """A frame presented as a structure map ``gamma`` on worlds.

    For ``kind == "box"`` each ``gamma[x]`` is a filter of the base; for
    ``kind == "mon"`` it is an up-closed collection of filters.
    """

    base: IFrame
    gamma: tuple
    kind: str

    def violation(self) -> Optional[tuple]:
        A = self.base.algebra
        if self.kind == "box":
            fs = set(self.base.filters)
            for x, g in enumerate(self.gamma):
                if g not in fs:
                    return ("not a filter", x)
            if self.gamma[A.top] != self.base.unit:
                return ("top", A.top)
            for x, y in product(A.elements, repeat=2):
                if self.gamma[A.meet(x, y)] != wedge(A, self.gamma[x], self.gamma[y]):
                    return ("meet", x, y)
            return None
        from .semantics import mon_conditions

        return mon_conditions(self.base, self.gamma)


def dialgebra_of(f: Frame) -> Dialgebra:
    if isinstance(f, BoxFrame):
        return Dialgebra(f.base, f.successors, "box")
    if isinstance(f, MonFrame):
        return Dialgebra(f.base, f.nbhd, "mon")
    raise DualityError("I-frames carry no structure map")


def frame_of(d: Dialgebra) -> Frame:
    """``x R y`` iff ``y ∈ gamma(x)`` in the box case; the neighbourhood map itself otherwise."""
    w = d.violation()
    if w is not None:
        raise DualityError(f"structure map is invalid: {w}")
    if d.kind == "box":
        return BoxFrame(d.base, frozenset((x, y) for x, g in enumerate(d.gamma) for y in g))
    return MonFrame(d.base, tuple(d.gamma))


# ---------------------------------------------------------------- complex algebra and dual frame


def m_box(f: BoxFrame, p) -> Filter:
    s = den_box(f, frozenset(p.elements if isinstance(p, Filter) else p))
    return Filter(s, f.algebra.meet_all(s))


def _filter_algebra(base: FiniteSemilattice) -> Tuple[FilterSemilattice, ImplicativeWitness]:
    FA = build_filter_semilattice(base)
    n = len(FA.filters)
    imp = tuple(
        tuple(FA.index[implication_set(base, FA.filters[i].elements, FA.filters[j].elements)] for j in range(n))
        for i in range(n)
    )
    return FA, ImplicativeWitness(imp)


def complex_algebra(f: BoxFrame) -> ISLO:
    FA, imp = _filter_algebra(f.algebra)
    box = tuple(FA.index[den_box(f, flt.elements)] for flt in FA.filters)
    return ISLO(FA.lattice, imp, box, tuple(x.elements for x in FA.filters))


def complex_mon_algebra(f: MonFrame) -> MonAlgebra:
    FA, imp = _filter_algebra(f.algebra)
    mon = tuple(FA.index[den_mon(f, flt.elements)] for flt in FA.filters)
    return MonAlgebra(FA.lattice, imp, mon, tuple(x.elements for x in FA.filters))


def box_trace(a: ISLO, p: ElemSet) -> ElemSet:
    """``{x | box(x) in p}`` for a filter ``p`` of the algebra."""
    return frozenset(x for x in a.algebra.elements if a.box[x] in p)


def dual_frame(a: ISLO) -> BoxFrame:
    FA = build_filter_semilattice(a.algebra)
    base = iframe(FA.lattice)
    fs = [flt.elements for flt in FA.filters]
    R = frozenset((i, j) for i, p in enumerate(fs) for j, q in enumerate(fs) if box_trace(a, p) <= q)
    return BoxFrame(base, R)


def dual_mon_frame(a: MonAlgebra) -> MonFrame:
    """Worlds are the filters ``p`` of ``A``; ``nbhd(p) = {ã | mon(a) in p}`` up-closed."""
    FA = build_filter_semilattice(a.algebra)
    base = iframe(FA.lattice)
    fs = [flt.elements for flt in FA.filters]
    tilde = [frozenset(i for i, p in enumerate(fs) if x in p) for x in a.algebra.elements]
    all_filters = base.filters
    nbhd = []
    for p in fs:
        gens = [tilde[x] for x in a.algebra.elements if a.mon[x] in p]
        nbhd.append(frozenset(b for b in all_filters if any(g <= b for g in gens)))
    return MonFrame(base, tuple(nbhd))


@dataclass(frozen=True)
class IsoReport:
    witness: Tuple[int, ...]
    description: str = ""


def _check_iso_semilattice(h: Sequence[int], A: FiniteSemilattice, B: FiniteSemilattice) -> None:
    if len(set(h)) != A.size or A.size != B.size:
        raise NotIso("not a bijection", h)
    if h[A.top] != B.top:
        raise NotIso("top", h)
    for x, y in product(A.elements, repeat=2):
        if h[A.meet(x, y)] != B.meet(h[x], h[y]):
            raise NotIso("meet", (x, y))


def duality_roundtrip_algebra(a: ISLO) -> IsoReport:
    """``a ≅ complex_algebra(dual_frame(a))`` via ``x ↦ {p | x in p}``."""
    D = dual_frame(a)
    C = complex_algebra(D)
    FA = build_filter_semilattice(a.algebra)
    index = {lab: i for i, lab in enumerate(C.labels)}
    h = []
    for x in a.algebra.elements:
        tilde = frozenset(i for i, p in enumerate(FA.filters) if x in p)
        if tilde not in index:
            raise NotIso("eta(x) is not a filter of the dual frame", x)
        h.append(index[tilde])
    h = tuple(h)
    _check_iso_semilattice(h, a.algebra, C.algebra)
    for x, y in product(a.algebra.elements, repeat=2):
        if h[a.imp(x, y)] != C.imp(h[x], h[y]):
            raise NotIso("implication", (x, y))
    for x in a.algebra.elements:
        if h[a.box[x]] != C.box[h[x]]:
            raise NotIso("box", x)
    return IsoReport(h, "eta: x -> {p | x in p}")


def duality_roundtrip_frame(f: BoxFrame) -> IsoReport:
    """``f ≅ dual_frame(complex_algebra(f))`` via ``x ↦ {a | x in a}`` (the principal filter on ``↑x``)."""
    C = complex_algebra(f)
    D = dual_frame(C)
    FD = build_filter_semilattice(C.algebra)
    index = {flt.elements: i for i, flt in enumerate(FD.filters)}
    h = []
    for x in f.worlds:
        members = frozenset(i for i, lab in enumerate(C.labels) if x in lab)
        if members not in index:
            raise NotIso("image of a world is not a filter", x)
        h.append(index[members])
    h = tuple(h)
    _check_iso_semilattice(h, f.algebra, D.algebra)
    for x, y in product(f.worlds, repeat=2):
        if ((x, y) in f.R) != ((h[x], h[y]) in D.R):
            raise NotIso("relation", (x, y))
    return IsoReport(h, "x -> {a | x in a}")


# ---------------------------------------------------------------- tau and rho-flat (box)


def _tilde_sets(A: FiniteSemilattice, FA: FilterSemilattice) -> List[FrozenSet[int]]:
    return [frozenset(i for i, p in enumerate(FA.filters) if x in p) for x in A.elements]


def tau_box(A: FiniteSemilattice, trace: ElemSet) -> FrozenSet[int]:
    """``{p in F(A) | trace ⊆ p}`` as a set of filter indices."""
    FA = build_filter_semilattice(A)
    trace = frozenset(trace)
    return frozenset(i for i, p in enumerate(FA.filters) if trace <= p.elements)


def rho_flat_box_trace(A: FiniteSemilattice, W: FrozenSet[int]) -> ElemSet:
    """``{a | W ⊆ ã}``: the box generators recovered from ``W``."""
    FA = build_filter_semilattice(A)
    tildes = _tilde_sets(A, FA)
    return frozenset(x for x in A.elements if W <= tildes[x])


def rho_flat_box(A: FiniteSemilattice, trace: ElemSet) -> bool:
    """``τ(U) ⊆ ã  ⇔  a ∈ trace(U)`` for every ``a``."""
    return rho_flat_box_trace(A, tau_box(A, trace)) == frozenset(trace)


def box_traces(A: FiniteSemilattice) -> List[ElemSet]:
    return [f.elements for f in build_filter_semilattice(A).filters]


# ---------------------------------------------------------------- tau and rho-flat (monotone)


@dataclass(frozen=True)
class MonTau:
    clopen: FrozenSet[FrozenSet[int]]
    closed: FrozenSet[FrozenSet[int]]
    arbitrary: FrozenSet[FrozenSet[int]]

    @property
    def collapsed(self) -> bool:
        return self.clopen == self.closed == self.arbitrary


def _filters_of_filters(A: FiniteSemilattice):
    F2 = build_filter_semilattice(A)
    FF2 = build_filter_semilattice(F2.lattice)
    all_ff = [f.elements for f in FF2.filters]
    clopens = _tilde_sets(A, F2)
    return F2, all_ff, clopens


def _closed(ff: Sequence[FrozenSet[int]], clopens: Sequence[FrozenSet[int]], universe: FrozenSet[int]):
    out = []
    for c in ff:
        inter = universe
        for t in clopens:
            if c <= t:
                inter = inter & t
        if inter == c:
            out.append(c)
    return out


def _cascade(
    all_ff: Sequence[FrozenSet[int]],
    clopens: Sequence[FrozenSet[int]],
    universe: FrozenSet[int],
    clopen_member: Callable[[int], bool],
) -> MonTau:
    clopen_set = set(clopens)
    tier1 = frozenset(clopens[a] for a in range(len(clopens)) if clopen_member(a))
    closed = _closed(all_ff, clopens, universe)
    tier2 = frozenset(c for c in closed if all(t in tier1 for t in clopen_set if c <= t))
    tier3 = frozenset(p for p in all_ff if any(c <= p for c in tier2))
    # Membership of clopen filters is fixed by tier 1 alone; the later tiers
    # decide the remaining filters, of which there are none at finite scale.
    return MonTau(tier1, frozenset(c for c in tier2), tier3)


def tau_mon(A: FiniteSemilattice, trace: ElemSet) -> MonTau:
    """The three-tier definition of ``τ_A(U)`` for ``U`` with ``{a | ⟓a ∈ U} = trace``."""
    F2, all_ff, clopens = _filters_of_filters(A)
    universe = frozenset(range(len(F2.filters)))
    trace = frozenset(trace)
    return _cascade(all_ff, clopens, universe, lambda a: a in trace)


def rho_flat_mon_trace(A: FiniteSemilattice, W: FrozenSet[FrozenSet[int]]) -> ElemSet:
    F2, _, clopens = _filters_of_filters(A)
    return frozenset(x for x in A.elements if clopens[x] in W)


def rho_flat_mon(A: FiniteSemilattice, trace: ElemSet) -> bool:
    """``⟓a ∈ U  ⇔  ã ∈ τ_A(U)`` for every ``a``."""
    return rho_flat_mon_trace(A, tau_mon(A, trace).arbitrary) == frozenset(trace)


def mon_traces(A: FiniteSemilattice) -> List[ElemSet]:
    """Up-closed subsets of ``A``, the empty one included."""
    return up_sets(A)


# ---------------------------------------------------------------- filter extensions


@dataclass(frozen=True, eq=False)
class Extension:
    frame: Frame
    eta: Tuple[int, ...]
    worlds: Tuple[FrozenSet[int], ...]  # each world as a set of F(X) indices
    first: FilterSemilattice  # F(X)


def _double_filters(f: Frame):
    F1 = build_filter_semilattice(f.base.algebra)
    F2 = build_filter_semilattice(F1.lattice)
    worlds = tuple(p.elements for p in F2.filters)
    eta = tuple(F2.index[frozenset(i for i, a in enumerate(F1.filters) if x in a)] for x in f.worlds)
    tildes = [frozenset(j for j, P in enumerate(worlds) if i in P) for i in range(len(F1.filters))]
    return F1, F2, worlds, eta, tildes


def filter_extension_box(f: BoxFrame) -> Extension:
    F1, F2, worlds, eta, tildes = _double_filters(f)
    base = iframe(F2.lattice)
    universe = frozenset(range(len(worlds)))
    boxed = [F1.index[den_box(f, a.elements)] for a in F1.filters]  # m_box(a) as an F(X) index
    R = set()
    for j, P in enumerate(worlds):
        g = universe
        for i in range(len(F1.filters)):
            if boxed[i] in P:
                g = g & tildes[i]
        R.update((j, k) for k in g)
    return Extension(BoxFrame(base, frozenset(R)), eta, worlds, F1)


def filter_extension_mon(f: MonFrame) -> Extension:
    F1, F2, worlds, eta, tildes = _double_filters(f)
    base = iframe(F2.lattice)
    universe = frozenset(range(len(worlds)))
    all_ff = list(base.filters)
    # {x | a in gamma(x)} as an F(X) index, for each a in F(X).
    pulled = [F1.index[den_mon(f, a.elements)] for a in F1.filters]
    nbhd = []
    for P in worlds:
        t = _cascade(all_ff, tildes, universe, lambda i, P=P: pulled[i] in P)
        nbhd.append(t.arbitrary)
    return Extension(MonFrame(base, tuple(nbhd)), eta, worlds, F1)


def filter_extension(f: Frame) -> Extension:
    if isinstance(f, BoxFrame):
        return filter_extension_box(f)
    if isinstance(f, MonFrame):
        return filter_extension_mon(f)
    F1, F2, worlds, eta, _ = _double_filters(f)
    return Extension(iframe(F2.lattice), eta, worlds, F1)


def extend_model(m: Model) -> Tuple[Model, Tuple[int, ...]]:
    """Filter extension of a model: ``V̂(p) = {P | V(p) ∈ P}``."""
    ext = filter_extension(m.frame)
    names = set(m.valuation)
    val = {}
    for p in names:
        i = ext.first.index[m.value(p)]
        val[p] = frozenset(j for j, P in enumerate(ext.worlds) if i in P)
    return Model(ext.frame, val), ext.eta


def mon_tier_collapse(f: MonFrame) -> bool:
    """At finite scale the closed and arbitrary tiers of the extension agree with the clopen tier."""
    F1, F2, worlds, eta, tildes = _double_filters(f)
    base = iframe(F2.lattice)
    universe = frozenset(range(len(worlds)))
    pulled = [F1.index[den_mon(f, a.elements)] for a in F1.filters]
    for P in worlds:
        t = _cascade(list(base.filters), tildes, universe, lambda i, P=P: pulled[i] in P)
        if not t.collapsed:
            return False
    return True


# ---------------------------------------------------------------- functor checks


def g_map(h: Sequence[int], a: ElemSet) -> ElemSet:
    """``Gh(a) = h[a]``."""
    return frozenset(h[x] for x in a)


def g_functoriality(h1: Sequence[int], h2: Sequence[int], src: Frame, mid: Frame, tgt: Frame) -> bool:
    """``G(h2 ∘ h1) = Gh2 ∘ Gh1`` on every filter of ``src``, with filter-valued images."""
    comp = tuple(h2[h1[x]] for x in src.worlds)
    for a in src.base.filters:
        once = g_map(h1, a)
        if not is_filter_set(mid.base.algebra, once):
            return False
        twice = g_map(h2, once)
        if twice != g_map(comp, a) or not is_filter_set(tgt.base.algebra, twice):
            return False
    return True


def tau_box_natural(h: Sequence[int], A: FiniteSemilattice, B: FiniteSemilattice, trace_B: ElemSet) -> bool:
    """Naturality square for ``τ`` at ``h : A → B`` and a trace on ``B``.

    The square commutes when ``h`` also preserves implication; for a bare
    meet-homomorphism the image side need not be up-closed.
    """
    pulled = frozenset(x for x in A.elements if h[x] in trace_B)
    FA, FB = build_filter_semilattice(A), build_filter_semilattice(B)
    left = {FA.filters[i].elements for i in tau_box(A, pulled)}
    right = {frozenset(x for x in A.elements if h[x] in FB.filters[j].elements) for j in tau_box(B, trace_B)}
    return left == right


def tau_mon_natural(h: Sequence[int], A: FiniteSemilattice, B: FiniteSemilattice, trace_B: ElemSet) -> bool:
    """``τ_A(h⁻¹ T) = H(F₂h)(τ_B(T))``, compared as collections of filters of ``F(A)``."""
    pulled = frozenset(x for x in A.elements if h[x] in trace_B)
    F2A, F2B = build_filter_semilattice(A), build_filter_semilattice(B)
    left = tau_mon(A, pulled).arbitrary
    right_B = tau_mon(B, trace_B).arbitrary
    # F₂h : F(B) -> F(A) sends q to h⁻¹(q).
    k = [F2A.index[frozenset(x for x in A.elements if h[x] in q.elements)] for q in F2B.filters]
    ffA = build_filter_semilattice(F2A.lattice)
    right = frozenset(
        ap.elements
        for ap in ffA.filters
        if frozenset(j for j in range(len(k)) if k[j] in ap.elements) in right_B
    )
    return left == right


# ---------------------------------------------------------------- equivalences


def _pair_closure(pairs: set) -> set:
    """Close a set of denotation pairs under pointwise intersection."""
    pairs = set(pairs)
    frontier = list(pairs)
    while frontier:
        new = []
        for a in frontier:
            for b in list(pairs):
                c = (a[0] & b[0], a[1] & b[1])
                if c not in pairs:
                    pairs.add(c)
                    new.append(c)
        frontier = new
    return pairs


def _shared_letters(m1: Model, m2: Model) -> List[str]:
    return sorted(set(m1.valuation) | set(m2.valuation))


def theory_pairs(m1: Model, m2: Model, depth: int, names: Optional[Sequence[str]] = None) -> set:
    """All pairs ``(⟦φ⟧₁, ⟦φ⟧₂)`` for formulas of implication/modal depth <= ``depth``.

    Conjunction does not add depth; each level is closed under it.
    """
    names = _shared_letters(m1, m2) if names is None else list(names)
    f1, f2 = m1.frame, m2.frame
    level = {(f1.base.full, f2.base.full)} | {(m1.value(p), m2.value(p)) for p in names}
    level = _pair_closure(level)
    for _ in range(depth):
        nxt = set(level)
        for (a1, a2), (b1, b2) in product(level, repeat=2):
            nxt.add((den_imp(f1, a1, b1), den_imp(f2, a2, b2)))
        for a1, a2 in level:
            if isinstance(f1, BoxFrame) and isinstance(f2, BoxFrame):
                nxt.add((den_box(f1, a1), den_box(f2, a2)))
            if isinstance(f1, MonFrame) and isinstance(f2, MonFrame):
                nxt.add((den_mon(f1, a1), den_mon(f2, a2)))
        level = _pair_closure(nxt)
    return level


def logical_equivalence(m1: Model, m2: Model, x1: int, x2: int, depth: int = 2) -> bool:
    return all((x1 in a) == (x2 in b) for a, b in theory_pairs(m1, m2, depth))


@dataclass(frozen=True)
class BehaviouralResult:
    equivalent: bool
    bound: int
    exhausted_bound: bool  # True when a negative answer only covers targets up to ``bound``
    target: Optional[Model] = None
    h1: Optional[Tuple[int, ...]] = None
    h2: Optional[Tuple[int, ...]] = None

    def __bool__(self):
        return self.equivalent


_MORPHISM_CACHE: Dict[tuple, List[Tuple[int, ...]]] = {}


def frame_key(f: Frame):
    A = f.base.algebra
    if isinstance(f, BoxFrame):
        extra = ("box", f.R)
    elif isinstance(f, MonFrame):
        extra = ("mon", f.nbhd)
    else:
        extra = ("i",)
    return (A.poset.leq, A.top) + extra


def frame_morphisms(src: Frame, tgt: Frame) -> List[Tuple[int, ...]]:
    from .order import homomorphisms

    key = (frame_key(src), frame_key(tgt))
    if key not in _MORPHISM_CACHE:
        kind = src.kind
        _MORPHISM_CACHE[key] = [
            h for h in homomorphisms(src.base.algebra, tgt.base.algebra) if morphism_failure(kind, h, src, tgt) is None
        ]
    return _MORPHISM_CACHE[key]


def behavioural_equivalence(m1: Model, m2: Model, x1: int, x2: int, bound: int = 6) -> BehaviouralResult:
    """Search for morphisms ``h1, h2`` into a common model (at most ``bound`` worlds) identifying ``x1`` and ``x2``."""
    from .search import enumerate_frames

    if m1.frame.kind != m2.frame.kind:
        raise DualityError("models of different kinds")
    if bound < 1:
        raise BoundTooSmall("bound must be at least 1")
    names = _shared_letters(m1, m2)
    n1, n2 = m1.frame.base.algebra.size, m2.frame.base.algebra.size
    for tgt in enumerate_frames(m1.frame.kind, bound):
        hs1 = [h for h in frame_morphisms(m1.frame, tgt)]
        if not hs1:
            continue
        hs2 = frame_morphisms(m2.frame, tgt)
        if not hs2:
            continue
        for h1 in hs1:
            for h2 in hs2:
                if h1[x1] != h2[x2]:
                    continue
                val = {}
                for p in names:
                    v1, v2 = m1.value(p), m2.value(p)
                    hit = next(
                        (a for a in tgt.base.filters if preimage(h1, a, n1) == v1 and preimage(h2, a, n2) == v2),
                        None,
                    )
                    if hit is None:
                        break
                    val[p] = hit
                else:
                    return BehaviouralResult(True, bound, False, Model(tgt, val), h1, h2)
    return BehaviouralResult(False, bound, True)
