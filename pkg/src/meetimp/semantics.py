"""Frames and models over finite implicative semilattices, and formula evaluation.

Worlds are the elements of the base semilattice. Denotations are element sets;
:func:`eval` wraps them as :class:`~meetimp.order.Filter` values.

Relations are sets of pairs, and composition is written left to right:
``compose(R1, R2) = {(x, z) | x R1 y R2 z}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .order import (
    Filter,
    FiniteSemilattice,
    ImplicativeWitness,
    OrderError,
    as_filter,
    enumerate_filters,
    implication_set,
    implicative_witness,
    is_filter_set,
    semilattice_from_json,
    semilattice_to_json,
    up_sets,
    validate_semilattice,
    FinitePoset,
)
from .syntax import And, Box, Formula, Imp, Letter, Mon, Top, letters as letters_of

Rel = FrozenSet[Tuple[int, int]]
ElemSet = FrozenSet[int]


class SemanticsError(ValueError):
    pass


class NotImplicative(SemanticsError):
    pass


class ModalityMismatch(SemanticsError):
    pass


class IncompatibleValuations(SemanticsError):
    pass


class FrameViolation(SemanticsError):
    def __init__(self, condition: str, witness):
        super().__init__(f"{condition} fails at {witness}")
        self.condition = condition
        self.witness = witness


# ---------------------------------------------------------------- frames


@dataclass(frozen=True, eq=False)
class IFrame:
    algebra: FiniteSemilattice
    imp: ImplicativeWitness

    kind = "i"

    @property
    def base(self) -> "IFrame":
        return self

    @property
    def worlds(self) -> range:
        return self.algebra.elements

    @cached_property
    def filters(self) -> Tuple[ElemSet, ...]:
        return tuple(f.elements for f in enumerate_filters(self.algebra))

    @cached_property
    def full(self) -> ElemSet:
        return frozenset(self.worlds)

    @cached_property
    def unit(self) -> ElemSet:
        return frozenset([self.algebra.top])

    @cached_property
    def _imp_cache(self) -> Dict[Tuple[ElemSet, ElemSet], ElemSet]:
        return {}


def iframe(A: FiniteSemilattice) -> IFrame:
    w = implicative_witness(A)
    if w is None:
        raise NotImplicative("base semilattice is not implicative")
    return IFrame(A, w)


@dataclass(frozen=True, eq=False)
class BoxFrame:
    base: IFrame
    R: Rel

    kind = "box"

    @property
    def algebra(self) -> FiniteSemilattice:
        return self.base.algebra

    @property
    def worlds(self) -> range:
        return self.base.worlds

    @cached_property
    def successors(self) -> Tuple[ElemSet, ...]:
        return tuple(frozenset(y for (x2, y) in self.R if x2 == x) for x in self.worlds)

    @cached_property
    def ps_successors(self) -> Tuple[ElemSet, ...]:
        """Successors along ``≤ ∘ R``."""
        A = self.algebra
        return tuple(frozenset().union(*(self.successors[x2] for x2 in A.up(x))) for x in self.worlds)

    def key(self):
        return (self.base.algebra, self.R)


@dataclass(frozen=True, eq=False)
class MonFrame:
    base: IFrame
    nbhd: Tuple[FrozenSet[ElemSet], ...]

    kind = "mon"

    @property
    def algebra(self) -> FiniteSemilattice:
        return self.base.algebra

    @property
    def worlds(self) -> range:
        return self.base.worlds

    def key(self):
        return (self.base.algebra, self.nbhd)


Frame = Union[IFrame, BoxFrame, MonFrame]


@dataclass(frozen=True, eq=False)
class Model:
    frame: Frame
    valuation: Mapping[str, ElemSet] = field(default_factory=dict)

    def value(self, p: str) -> ElemSet:
        v = self.valuation.get(p)
        return v if v is not None else self.frame.base.unit


def make_model(frame: Frame, valuation: Mapping[str, Iterable[int]]) -> Model:
    A = frame.base.algebra
    val = {}
    for p, s in valuation.items():
        s = frozenset(s.elements if isinstance(s, Filter) else s)
        if not is_filter_set(A, s):
            raise SemanticsError(f"valuation of {p!r} is not a filter: {sorted(s)}")
        val[p] = s
    return Model(frame, val)


# ---------------------------------------------------------------- relations


def leq_rel(A: FiniteSemilattice) -> Rel:
    return frozenset(A.poset.pairs())


def geq_rel(A: FiniteSemilattice) -> Rel:
    return frozenset((j, i) for i, j in A.poset.pairs())


def compose(r1: Iterable[Tuple[int, int]], r2: Iterable[Tuple[int, int]]) -> Rel:
    r2_by = {}
    for y, z in r2:
        r2_by.setdefault(y, set()).add(z)
    return frozenset((x, z) for x, y in r1 for z in r2_by.get(y, ()))


def image(R: Iterable[Tuple[int, int]], x: int) -> ElemSet:
    return frozenset(y for x2, y in R if x2 == x)


# ---------------------------------------------------------------- box frames


def box_conditions(base: IFrame, R: Iterable[Tuple[int, int]]) -> Dict[str, Optional[tuple]]:
    """Check B1 to B4 exhaustively; each entry is ``None`` or a witness of failure."""
    A = base.algebra
    R = frozenset(R)
    n, top = A.size, A.top
    succ = [image(R, x) for x in range(n)]
    out: Dict[str, Optional[tuple]] = {"B1": None, "B2": None, "B3": None, "B4": None}
    for x in range(n):
        if (top, x) in R and x != top:
            out["B1"] = ("top R", x)
            break
        if (x, top) not in R:
            out["B1"] = ("not R top", x)
            break
    for x, y in sorted(R):
        for z in A.up(y):
            if z not in succ[x]:
                out["B2"] = (x, y, z)
                break
        if out["B2"]:
            break
    for (x, y), (x2, y2) in product(sorted(R), repeat=2):
        if (A.meet(x, x2), A.meet(y, y2)) not in R:
            out["B3"] = (x, y, x2, y2)
            break
    for x, x2 in product(range(n), repeat=2):
        for z in succ[A.meet(x, x2)]:
            if not any(A.meet(y, y2) == z for y in succ[x] for y2 in succ[x2]):
                out["B4"] = (x, x2, z)
                break
        if out["B4"]:
            break
    return out


def gamma_condition(base: IFrame, R: Iterable[Tuple[int, int]]) -> Optional[tuple]:
    """``x ↦ R[x]`` must be a filter-valued map preserving top and pointwise meets."""
    A = base.algebra
    R = frozenset(R)
    succ = [image(R, x) for x in A.elements]
    for x in A.elements:
        if not is_filter_set(A, succ[x]):
            return ("not a filter", x)
    if succ[A.top] != frozenset([A.top]):
        return ("top", A.top)
    for x, y in product(A.elements, repeat=2):
        pointwise = frozenset(A.meet(a, b) for a in succ[x] for b in succ[y])
        if succ[A.meet(x, y)] != pointwise:
            return ("meet", x, y)
    return None


def validate_box_frame(base: Union[IFrame, FiniteSemilattice], R: Iterable[Tuple[int, int]]) -> BoxFrame:
    if isinstance(base, FiniteSemilattice):
        base = iframe(base)
    R = frozenset((int(a), int(b)) for a, b in R)
    n = base.algebra.size
    if any(not (0 <= a < n and 0 <= b < n) for a, b in R):
        raise SemanticsError("relation mentions a world outside the carrier")
    conds = box_conditions(base, R)
    gamma = gamma_condition(base, R)
    ok_b = all(w is None for w in conds.values())
    if ok_b != (gamma is None):
        raise AssertionError(f"B1-B4 and the dialgebra characterisation disagree on {sorted(R)}")
    for name in ("B1", "B2", "B3", "B4"):
        if conds[name] is not None:
            raise FrameViolation(name, conds[name])
    return BoxFrame(base, R)


def box_frame_from_gamma(base: IFrame, g: Sequence[int]) -> BoxFrame:
    """The frame with ``R[x] = ↑g(x)`` for a top- and meet-preserving ``g``."""
    A = base.algebra
    R = frozenset((x, y) for x in A.elements for y in A.up(g[x]))
    return BoxFrame(base, R)


# ---------------------------------------------------------------- monotone frames


def nbhd_lattice(base: IFrame) -> Tuple[Tuple[FrozenSet[ElemSet], ...], FiniteSemilattice]:
    """Up-closed collections of filters ordered by inclusion (top: all filters)."""
    fs = base.filters
    FA = validate_semilattice(FinitePoset.from_function(len(fs), lambda i, j: fs[i] <= fs[j]), next(i for i, f in enumerate(fs) if len(f) == base.algebra.size))
    ups = up_sets(FA)
    carriers = tuple(frozenset(fs[i] for i in u) for u in ups)
    poset = FinitePoset.from_function(len(carriers), lambda i, j: carriers[i] <= carriers[j])
    top = next(i for i, c in enumerate(carriers) if len(c) == len(fs))
    return carriers, validate_semilattice(poset, top)


def mon_conditions(base: IFrame, nbhd: Sequence[Iterable[ElemSet]]) -> Optional[tuple]:
    A = base.algebra
    fs = set(base.filters)
    nb = [frozenset(frozenset(a) for a in w) for w in nbhd]
    if len(nb) != A.size:
        return ("arity", len(nb))
    for x, W in enumerate(nb):
        for a in W:
            if a not in fs:
                return ("not a filter", x, sorted(a))
            for b in fs:
                if a <= b and b not in W:
                    return ("not up-closed", x, sorted(a), sorted(b))
    if nb[A.top] != frozenset(fs):
        return ("top", A.top)
    for x, y in product(A.elements, repeat=2):
        if nb[A.meet(x, y)] != nb[x] & nb[y]:
            return ("meet", x, y)
    return None


def validate_mon_frame(base: Union[IFrame, FiniteSemilattice], nbhd) -> MonFrame:
    if isinstance(base, FiniteSemilattice):
        base = iframe(base)
    w = mon_conditions(base, nbhd)
    if w is not None:
        raise FrameViolation("monotone frame", w)
    return MonFrame(base, tuple(frozenset(frozenset(a) for a in W) for W in nbhd))


# ---------------------------------------------------------------- evaluation


def den_and(a: ElemSet, b: ElemSet) -> ElemSet:
    return a & b


def den_imp(frame: Frame, a: ElemSet, b: ElemSet) -> ElemSet:
    cache = frame.base._imp_cache
    key = (a, b)
    out = cache.get(key)
    if out is None:
        out = cache[key] = implication_set(frame.base.algebra, a, b)
    return out


def den_box(frame: BoxFrame, a: ElemSet, plotkin_stirling: bool = False) -> ElemSet:
    succ = frame.ps_successors if plotkin_stirling else frame.successors
    return frozenset(x for x in frame.worlds if succ[x] <= a)


def den_mon(frame: MonFrame, a: ElemSet) -> ElemSet:
    return frozenset(x for x in frame.worlds if a in frame.nbhd[x])


def denotation(m: Model, f: Formula, box_semantics: str = "standard", memo: Optional[dict] = None) -> ElemSet:
    if memo is not None and f in memo:
        return memo[f]
    fr = m.frame
    if isinstance(f, Top):
        out = fr.base.full
    elif isinstance(f, Letter):
        out = m.value(f.name)
    elif isinstance(f, And):
        out = den_and(denotation(m, f.left, box_semantics, memo), denotation(m, f.right, box_semantics, memo))
    elif isinstance(f, Imp):
        out = den_imp(fr, denotation(m, f.left, box_semantics, memo), denotation(m, f.right, box_semantics, memo))
    elif isinstance(f, Box):
        if not isinstance(fr, BoxFrame):
            raise ModalityMismatch("[] needs a box frame")
        out = den_box(fr, denotation(m, f.body, box_semantics, memo), box_semantics == "plotkin_stirling")
    elif isinstance(f, Mon):
        if not isinstance(fr, MonFrame):
            raise ModalityMismatch("<m> needs a monotone frame")
        out = den_mon(fr, denotation(m, f.body, box_semantics, memo))
    else:
        raise TypeError(f"not a formula: {f!r}")
    if memo is not None:
        memo[f] = out
    return out


def eval(m: Model, f: Formula, box_semantics: str = "standard") -> Filter:  # noqa: A001 - public name
    s = denotation(m, f, box_semantics)
    return Filter(s, m.frame.base.algebra.meet_all(s))


def satisfies(m: Model, x: int, f: Formula) -> bool:
    return x in denotation(m, f)


def valuations(frame: Frame, names: Sequence[str]):
    """All filter valuations of ``names``: letters sorted, filters by generator index."""
    names = sorted(set(names))
    fs = frame.base.filters
    for combo in product(range(len(fs)), repeat=len(names)):
        yield {p: fs[i] for p, i in zip(names, combo)}


@dataclass(frozen=True)
class ValidityReport:
    valid: bool
    valuation: Optional[Dict[str, ElemSet]] = None
    world: Optional[int] = None

    def __bool__(self):
        return self.valid


def frame_validates(frame: Frame, phi: Formula, names: Optional[Sequence[str]] = None) -> ValidityReport:
    names = sorted(letters_of(phi)) if names is None else sorted(set(names))
    full = frame.base.full
    for v in valuations(frame, names):
        d = denotation(Model(frame, v), phi)
        if d != full:
            return ValidityReport(False, v, min(full - d))
    return ValidityReport(True)


# ---------------------------------------------------------------- batch evaluation
#
# Every denotation is a principal filter, so it can be carried around as its
# generator. A pool of formulas is hash-consed once into a node list; a frame
# contributes lookup tables for the connectives on generators.


@dataclass(frozen=True)
class CompiledPool:
    nodes: Tuple[tuple, ...]  # ("T",) | ("L", name) | ("&", i, j) | ("->", i, j) | ("[]", i) | ("<m>", i)
    roots: Tuple[int, ...]
    names: Tuple[str, ...]


def compile_pool(formulas: Iterable[Formula]) -> CompiledPool:
    index: Dict[Formula, int] = {}
    nodes: List[tuple] = []
    names = set()

    def go(f: Formula) -> int:
        i = index.get(f)
        if i is not None:
            return i
        if isinstance(f, Top):
            node = ("T",)
        elif isinstance(f, Letter):
            names.add(f.name)
            node = ("L", f.name)
        elif isinstance(f, And):
            node = ("&", go(f.left), go(f.right))
        elif isinstance(f, Imp):
            node = ("->", go(f.left), go(f.right))
        elif isinstance(f, Box):
            node = ("[]", go(f.body))
        elif isinstance(f, Mon):
            node = ("<m>", go(f.body))
        else:
            raise TypeError(f"not a formula: {f!r}")
        index[f] = len(nodes)
        nodes.append(node)
        return index[f]

    roots = tuple(go(f) for f in formulas)
    return CompiledPool(tuple(nodes), roots, tuple(sorted(names)))


@dataclass(frozen=True, eq=False)
class GeneratorTables:
    top: int  # generator of the unit filter
    bottom: int  # generator of the whole carrier
    conj: Tuple[Tuple[int, ...], ...]
    imp: Tuple[Tuple[int, ...], ...]
    box: Optional[Tuple[int, ...]]
    mon: Optional[Tuple[int, ...]]


def generator_tables(frame: Frame) -> GeneratorTables:
    A = frame.base.algebra
    n = A.size
    up = [A.up(g) for g in range(n)]
    conj = tuple(tuple(A.join(g, h) for h in range(n)) for g in range(n))
    imp = tuple(tuple(A.meet_all(den_imp(frame, up[g], up[h])) for h in range(n)) for g in range(n))
    box = tuple(A.meet_all(den_box(frame, up[g])) for g in range(n)) if isinstance(frame, BoxFrame) else None
    mon = tuple(A.meet_all(den_mon(frame, up[g])) for g in range(n)) if isinstance(frame, MonFrame) else None
    return GeneratorTables(A.top, A.bottom, conj, imp, box, mon)


def pool_generators(m: Model, pool: CompiledPool, tables: Optional[GeneratorTables] = None) -> List[int]:
    """Generator of ``⟦φ⟧`` for every node of ``pool``."""
    t = tables or generator_tables(m.frame)
    A = m.frame.base.algebra
    out: List[int] = []
    for node in pool.nodes:
        op = node[0]
        if op == "T":
            out.append(t.bottom)
        elif op == "L":
            out.append(A.meet_all(m.value(node[1])))
        elif op == "&":
            out.append(t.conj[out[node[1]]][out[node[2]]])
        elif op == "->":
            out.append(t.imp[out[node[1]]][out[node[2]]])
        elif op == "[]":
            if t.box is None:
                raise ModalityMismatch("[] needs a box frame")
            out.append(t.box[out[node[1]]])
        else:
            if t.mon is None:
                raise ModalityMismatch("<m> needs a monotone frame")
            out.append(t.mon[out[node[1]]])
    return out


def pool_failures(frame: Frame, pool: CompiledPool, names: Optional[Sequence[str]] = None):
    """Yield ``(root position, valuation, world)`` for every pool formula refuted on ``frame``."""
    names = pool.names if names is None else sorted(set(names))
    t = generator_tables(frame)
    for v in valuations(frame, names):
        gens = pool_generators(Model(frame, v), pool, t)
        for k, r in enumerate(pool.roots):
            g = gens[r]
            if g != t.bottom:
                yield k, v, min(x for x in frame.worlds if not frame.base.algebra.le(g, x))


# ---------------------------------------------------------------- derived conditions


def derived_frame_conditions(f: BoxFrame) -> Dict[str, bool]:
    A = f.algebra
    le, ge, R = leq_rel(A), geq_rel(A), f.R
    leRle = compose(compose(le, R), le)
    ps_agree = True
    for a in f.base.filters:
        if den_box(f, a) != den_box(f, a, plotkin_stirling=True):
            ps_agree = False
            break
    return {
        "R = <=;R;<=": leRle == R,
        ">=;R <= R;>=": compose(ge, R) <= compose(R, ge),
        "H-box: <=;R <= R;<=": compose(le, R) <= compose(R, le),
        "condensed: R;<= = R": compose(R, le) == R,
        "strictly condensed": leRle == R,
        "Plotkin-Stirling: >=;R <= R;>= and R;<= <= <=;R": compose(ge, R) <= compose(R, ge)
        and compose(R, le) <= compose(le, R),
        "Plotkin-Stirling clause agrees": ps_agree,
    }


# ---------------------------------------------------------------- morphisms


def preimage(h: Sequence[int], a: Iterable[int], n: int) -> ElemSet:
    a = frozenset(a)
    return frozenset(x for x in range(n) if h[x] in a)


def morphism_failure(kind: str, h: Sequence[int], src: Frame, tgt: Frame) -> Optional[str]:
    A, B = src.base.algebra, tgt.base.algebra
    if len(h) != A.size or any(not 0 <= v < B.size for v in h):
        return "not a total map into the target"
    if h[A.top] != B.top:
        return "top not preserved"
    for x, y in product(A.elements, repeat=2):
        if h[A.meet(x, y)] != B.meet(h[x], h[y]):
            return f"meet of {x},{y} not preserved"
    for x in A.elements:
        reach = {h[y] for y in A.up(x)}
        for y2 in B.up(h[x]):
            if y2 not in reach:
                return f"not bounded at {x} -> {y2}"
    kind = kind.lower()
    if kind == "box":
        assert isinstance(src, BoxFrame) and isinstance(tgt, BoxFrame)
        for x in A.elements:
            img = frozenset(h[y] for y in src.successors[x])
            if not img <= tgt.successors[h[x]]:
                return f"forth fails at {x}"
            if tgt.successors[h[x]] - img:
                return f"back fails at {x}"
    elif kind == "mon":
        assert isinstance(src, MonFrame) and isinstance(tgt, MonFrame)
        for x in A.elements:
            pulled = frozenset(a for a in tgt.base.filters if preimage(h, a, A.size) in src.nbhd[x])
            if pulled != tgt.nbhd[h[x]]:
                return f"neighbourhood square fails at {x}"
    elif kind != "i":
        return f"unknown morphism kind {kind!r}"
    return None


def check_morphism(kind: str, h: Sequence[int], source: Frame, target: Frame) -> bool:
    return morphism_failure(kind, h, source, target) is None


def valuations_compatible(h: Sequence[int], src: Model, tgt: Model, names: Iterable[str]) -> bool:
    n = src.frame.base.algebra.size
    return all(preimage(h, tgt.value(p), n) == src.value(p) for p in names)


def truth_preservation_check(h: Sequence[int], source: Model, target: Model, pool: Sequence[Formula]) -> bool:
    names = set(source.valuation) | set(target.valuation)
    for f in pool:
        names |= letters_of(f)
    if not valuations_compatible(h, source, target, names):
        raise IncompatibleValuations("source valuation is not the preimage of the target valuation")
    ms, mt = {}, {}
    for f in pool:
        ds, dt = denotation(source, f, memo=ms), denotation(target, f, memo=mt)
        for x in source.frame.worlds:
            if (x in ds) != (h[x] in dt):
                return False
    return True


# ---------------------------------------------------------------- JSON


def model_to_json(m: Model) -> dict:
    fr = m.frame
    out = {"semilattice": semilattice_to_json(fr.base.algebra), "kind": fr.kind}
    if isinstance(fr, BoxFrame):
        out["R"] = [list(p) for p in sorted(fr.R)]
    if isinstance(fr, MonFrame):
        out["nbhd"] = [sorted(sorted(a) for a in W) for W in fr.nbhd]
    out["valuation"] = {p: sorted(v) for p, v in sorted(m.valuation.items())}
    return out


def frame_from_json(obj) -> Frame:
    if isinstance(obj, str):
        obj = json.loads(obj)
    A = semilattice_from_json(obj["semilattice"])
    base = iframe(A)
    kind = obj.get("kind", "i")
    if kind == "i":
        return base
    if kind == "box":
        return validate_box_frame(base, [tuple(p) for p in obj.get("R", [])])
    if kind == "mon":
        return validate_mon_frame(base, [[frozenset(a) for a in W] for W in obj["nbhd"]])
    raise SemanticsError(f"unknown frame kind {kind!r}")


def model_from_json(obj) -> Model:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        frame = frame_from_json(obj)
        return make_model(frame, {p: v for p, v in obj.get("valuation", {}).items()})
    except (KeyError, TypeError) as exc:
        raise SemanticsError(f"malformed model object: {exc}") from exc
