"""Finite posets, meet-semilattices with top, filters, and the filter semilattice.

Elements are integer indices ``0 .. size-1``. All structures are immutable once
validated; derived tables are cached lazily.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple


class OrderError(ValueError):
    """Base class for structural errors in this module."""


class PosetError(OrderError):
    pass


class MissingMeet(OrderError):
    def __init__(self, x: int, y: int):
        super().__init__(f"elements {x} and {y} have no greatest lower bound")
        self.x, self.y = x, y


class NoTop(OrderError):
    def __init__(self, top: int):
        super().__init__(f"element {top} is not the maximum")
        self.top = top


class NotDistributive(OrderError):
    pass


class EmptySeed(OrderError):
    pass


class NotAFilter(OrderError):
    pass


@dataclass(frozen=True)
class FinitePoset:
    size: int
    leq: Tuple[Tuple[bool, ...], ...]

    @staticmethod
    def from_pairs(size: int, pairs: Iterable[Sequence[int]]) -> "FinitePoset":
        """Reflexively close ``pairs`` and check the partial-order laws."""
        if size < 1:
            raise PosetError("a poset here needs at least one element")
        rel = [[i == j for j in range(size)] for i in range(size)]
        for pair in pairs:
            i, j = pair
            if not (0 <= i < size and 0 <= j < size):
                raise PosetError(f"pair {(i, j)} out of range")
            rel[i][j] = True
        p = FinitePoset(size, tuple(tuple(r) for r in rel))
        p.check()
        return p

    @staticmethod
    def from_function(size: int, leq) -> "FinitePoset":
        p = FinitePoset(size, tuple(tuple(bool(leq(i, j)) for j in range(size)) for i in range(size)))
        p.check()
        return p

    def check(self) -> None:
        n, r = self.size, self.leq
        for i in range(n):
            if not r[i][i]:
                raise PosetError(f"not reflexive at {i}")
            for j in range(n):
                if i != j and r[i][j] and r[j][i]:
                    raise PosetError(f"not antisymmetric: {i} and {j}")
                if r[i][j]:
                    for k in range(n):
                        if r[j][k] and not r[i][k]:
                            raise PosetError(f"not transitive: {i} <= {j} <= {k}")

    def le(self, i: int, j: int) -> bool:
        return self.leq[i][j]

    def pairs(self) -> List[Tuple[int, int]]:
        return [(i, j) for i in range(self.size) for j in range(self.size) if self.leq[i][j]]

    @cached_property
    def _ups(self) -> Tuple[FrozenSet[int], ...]:
        return tuple(frozenset(j for j in range(self.size) if self.leq[i][j]) for i in range(self.size))

    @cached_property
    def _downs(self) -> Tuple[FrozenSet[int], ...]:
        return tuple(frozenset(j for j in range(self.size) if self.leq[j][i]) for i in range(self.size))

    def up(self, i: int) -> FrozenSet[int]:
        return self._ups[i]

    def down(self, i: int) -> FrozenSet[int]:
        return self._downs[i]


@dataclass(frozen=True, eq=False)
class FiniteSemilattice:
    poset: FinitePoset
    top: int
    meet_table: Tuple[Tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return self.poset.size

    @property
    def elements(self) -> range:
        return range(self.poset.size)

    def le(self, i: int, j: int) -> bool:
        return self.poset.leq[i][j]

    def meet(self, i: int, j: int) -> int:
        return self.meet_table[i][j]

    def meet_all(self, xs: Iterable[int]) -> int:
        out = self.top
        for x in xs:
            out = self.meet_table[out][x]
        return out

    @cached_property
    def bottom(self) -> int:
        return self.meet_all(self.elements)

    @cached_property
    def join_table(self) -> Tuple[Tuple[int, ...], ...]:
        # Finite meet-semilattices with top are lattices: the join is the meet of all upper bounds.
        n = self.size
        return tuple(
            tuple(self.meet_all(k for k in range(n) if self.le(i, k) and self.le(j, k)) for j in range(n))
            for i in range(n)
        )

    def join(self, i: int, j: int) -> int:
        return self.join_table[i][j]

    def up(self, i: int) -> FrozenSet[int]:
        return self.poset.up(i)

    def __eq__(self, other):
        if not isinstance(other, FiniteSemilattice):
            return NotImplemented
        return self.poset == other.poset and self.top == other.top

    def __hash__(self):
        return hash((self.poset, self.top))

    def __repr__(self):
        return f"FiniteSemilattice(size={self.size}, top={self.top}, leq={self.poset.pairs()})"


@dataclass(frozen=True)
class Filter:
    elements: FrozenSet[int]
    generator: int

    def __contains__(self, x) -> bool:
        return x in self.elements

    def __iter__(self):
        return iter(sorted(self.elements))

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self):
        return f"Filter(up {self.generator}: {sorted(self.elements)})"


@dataclass(frozen=True)
class ImplicativeWitness:
    imp: Tuple[Tuple[int, ...], ...]

    def __call__(self, y: int, z: int) -> int:
        return self.imp[y][z]


def validate_semilattice(p: FinitePoset, top: int) -> FiniteSemilattice:
    n = p.size
    if not 0 <= top < n or any(not p.leq[x][top] for x in range(n)):
        raise NoTop(top)
    table = [[0] * n for _ in range(n)]
    for x in range(n):
        for y in range(x, n):
            lower = [z for z in range(n) if p.leq[z][x] and p.leq[z][y]]
            glb = [z for z in lower if all(p.leq[w][z] for w in lower)]
            if not glb:
                raise MissingMeet(x, y)
            table[x][y] = table[y][x] = glb[0]
    return FiniteSemilattice(p, top, tuple(tuple(r) for r in table))


def semilattice_from_pairs(size: int, pairs, top: Optional[int] = None) -> FiniteSemilattice:
    p = FinitePoset.from_pairs(size, pairs)
    if top is None:
        maxima = [t for t in range(size) if all(p.leq[x][t] for x in range(size))]
        if not maxima:
            raise NoTop(-1)
        top = maxima[0]
    return validate_semilattice(p, top)


def chain(n: int) -> FiniteSemilattice:
    """``0 < 1 < ... < n-1``."""
    return validate_semilattice(FinitePoset.from_function(n, lambda i, j: i <= j), n - 1)


def is_distributive(A: FiniteSemilattice) -> bool:
    n = A.size
    ups = [A.up(x) for x in range(n)]
    # For each c, which pairs (a', b') meet to exactly c.
    witnesses = {c: [] for c in range(n)}
    for a2 in range(n):
        for b2 in range(n):
            witnesses[A.meet(a2, b2)].append((a2, b2))
    for a in range(n):
        for b in range(n):
            m = A.meet(a, b)
            for c in ups[m]:
                if not any(A.le(a, a2) and A.le(b, b2) for a2, b2 in witnesses[c]):
                    return False
    return True


def distributivity_counterexample(A: FiniteSemilattice) -> Optional[Tuple[int, int, int]]:
    n = A.size
    for a, b, c in product(range(n), repeat=3):
        if A.le(A.meet(a, b), c):
            if not any(
                A.le(a, a2) and A.le(b, b2) and A.meet(a2, b2) == c for a2 in range(n) for b2 in range(n)
            ):
                return (a, b, c)
    return None


def implicative_witness(A: FiniteSemilattice) -> Optional[ImplicativeWitness]:
    n = A.size
    table = []
    for y in range(n):
        row = []
        for z in range(n):
            cands = [x for x in range(n) if A.le(A.meet(x, y), z)]
            best = [x for x in cands if all(A.le(w, x) for w in cands)]
            if not best:
                return None
            row.append(best[0])
        table.append(tuple(row))
    return ImplicativeWitness(tuple(table))


def principal(A: FiniteSemilattice, x: int) -> Filter:
    return Filter(A.up(x), x)


def enumerate_filters(A: FiniteSemilattice) -> List[Filter]:
    return [principal(A, x) for x in range(A.size)]


def is_filter_set(A: FiniteSemilattice, s: Iterable[int]) -> bool:
    s = frozenset(s)
    if not s:
        return False
    for x in s:
        if not A.up(x) <= s:
            return False
        for y in s:
            if A.meet(x, y) not in s:
                return False
    return True


def as_filter(A: FiniteSemilattice, s: Iterable[int]) -> Filter:
    """Wrap an element set that must already be a filter."""
    s = frozenset(s)
    if not is_filter_set(A, s):
        raise NotAFilter(f"{sorted(s)} is not a filter")
    return Filter(s, A.meet_all(s))


def filter_closure(A: FiniteSemilattice, s: Iterable[int]) -> Filter:
    s = list(s)
    if not s:
        raise EmptySeed("cannot close an empty set to a filter")
    g = A.meet_all(s)
    return principal(A, g)


def filter_join(A: FiniteSemilattice, p: Filter, q: Filter) -> Filter:
    """Pointwise meet of two filters."""
    s = frozenset(A.meet(a, b) for a in p.elements for b in q.elements)
    if not is_filter_set(A, s):
        raise NotDistributive("pointwise meet of two filters is not a filter")
    return Filter(s, A.meet_all(s))


def implication_set(A: FiniteSemilattice, a: Iterable[int], b: Iterable[int]) -> FrozenSet[int]:
    """``{x | for all y >= x, y in a implies y in b}`` on raw element sets."""
    a, b = frozenset(a), frozenset(b)
    return frozenset(x for x in range(A.size) if all(y in b for y in A.up(x) if y in a))


def filter_implication(A: FiniteSemilattice, a: Filter, b: Filter) -> Filter:
    s = implication_set(A, a.elements, b.elements)
    if not is_filter_set(A, s):
        raise NotDistributive("filter implication is not a filter")
    return Filter(s, A.meet_all(s))


@dataclass(frozen=True, eq=False)
class FilterSemilattice:
    """``F(A)``: filters of ``A`` ordered by inclusion, meet is intersection."""

    base: FiniteSemilattice
    filters: Tuple[Filter, ...]
    lattice: FiniteSemilattice
    index: Dict[FrozenSet[int], int] = field(repr=False)

    def of(self, f: Filter) -> int:
        return self.index[f.elements]

    def filter_at(self, i: int) -> Filter:
        return self.filters[i]


def build_filter_semilattice(A: FiniteSemilattice) -> FilterSemilattice:
    fs = tuple(enumerate_filters(A))
    n = len(fs)
    poset = FinitePoset.from_function(n, lambda i, j: fs[i].elements <= fs[j].elements)
    top = next(i for i, f in enumerate(fs) if len(f) == A.size)
    lat = validate_semilattice(poset, top)
    # Intersection must agree with the computed glb.
    idx = {f.elements: i for i, f in enumerate(fs)}
    for i in range(n):
        for j in range(n):
            assert idx[fs[i].elements & fs[j].elements] == lat.meet(i, j)
    return FilterSemilattice(A, fs, lat, idx)


def eta(A: FiniteSemilattice, a: int, FA: Optional[FilterSemilattice] = None) -> Filter:
    """The filters of ``A`` containing ``a``, as a filter of ``F(A)``."""
    FA = FA or build_filter_semilattice(A)
    members = frozenset(i for i, f in enumerate(FA.filters) if a in f)
    return as_filter(FA.lattice, members)


def up_sets(A: FiniteSemilattice) -> List[FrozenSet[int]]:
    """All up-closed subsets (including the empty set), in a canonical order."""
    n = A.size
    out = []
    for mask in range(1 << n):
        s = frozenset(i for i in range(n) if mask >> i & 1)
        if all(A.up(x) <= s for x in s):
            out.append(s)
    out.sort(key=lambda s: (len(s), sorted(s)))
    return out


def semilattice_to_json(A: FiniteSemilattice) -> dict:
    return {
        "size": A.size,
        "top": A.top,
        "leq": [[i, j] for i, j in A.poset.pairs() if i != j],
    }


def semilattice_from_json(obj) -> FiniteSemilattice:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        size, top, pairs = int(obj["size"]), int(obj["top"]), obj.get("leq", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise OrderError(f"malformed semilattice object: {exc}") from exc
    return validate_semilattice(FinitePoset.from_pairs(size, pairs), top)


def is_homomorphism(h: Sequence[int], A: FiniteSemilattice, B: FiniteSemilattice) -> bool:
    """Top- and meet-preserving map between semilattices."""
    if h[A.top] != B.top:
        return False
    return all(h[A.meet(x, y)] == B.meet(h[x], h[y]) for x in range(A.size) for y in range(A.size))


def homomorphisms(A: FiniteSemilattice, B: FiniteSemilattice) -> List[Tuple[int, ...]]:
    """All top- and meet-preserving maps ``A -> B`` by backtracking."""
    out = []
    h = [None] * A.size

    def consistent(k: int) -> bool:
        for x in range(k + 1):
            m = A.meet(x, k)
            if m <= k and h[m] != B.meet(h[x], h[k]):
                return False
        return True

    def go(k: int):
        if k == A.size:
            if is_homomorphism(h, A, B):
                out.append(tuple(h))
            return
        choices = [B.top] if k == A.top else range(B.size)
        for v in choices:
            h[k] = v
            if consistent(k):
                go(k + 1)
        h[k] = None

    go(0)
    return out
