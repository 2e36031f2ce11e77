"""A shipped catalog of small meet-semilattices with top.

Every finite meet-semilattice with top is a lattice, so the generator walks
naturally labeled lattices (``0`` the bottom, ``n-1`` the top, ``i <= j`` only
if ``i <= j`` numerically) and keeps one representative per isomorphism class.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations, product
from typing import List, NamedTuple, Tuple

from .order import (
    FinitePoset,
    FiniteSemilattice,
    MissingMeet,
    PosetError,
    chain,
    implicative_witness,
    is_distributive,
    semilattice_from_pairs,
    validate_semilattice,
)


class Entry(NamedTuple):
    name: str
    lattice: FiniteSemilattice


def one_point() -> FiniteSemilattice:
    return chain(1)


def diamond() -> FiniteSemilattice:
    """``0 < x, y < 1`` with x = 1, y = 2, top = 3."""
    return semilattice_from_pairs(4, [(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)], top=3)


def m3() -> FiniteSemilattice:
    return semilattice_from_pairs(
        5, [(0, 1), (0, 2), (0, 3), (0, 4), (1, 4), (2, 4), (3, 4)], top=4
    )


def n5() -> FiniteSemilattice:
    """Pentagon: 0 < 1 < 2 < 4 and 0 < 3 < 4."""
    return semilattice_from_pairs(
        5, [(0, 1), (1, 2), (0, 2), (2, 4), (1, 4), (0, 3), (3, 4), (0, 4)], top=4
    )


def v_poset() -> FinitePoset:
    """Two incomparable elements under a top and nothing below them."""
    return FinitePoset.from_pairs(3, [(0, 2), (1, 2)])


def free_semilattice(k: int) -> FiniteSemilattice:
    """Finite subsets of ``k`` generators under union, read as meet.

    Element ``i`` is the bitmask of its subset; the empty subset is the top and
    ``a <= b`` iff ``b`` is a subset of ``a``.
    """
    n = 1 << k
    poset = FinitePoset.from_function(n, lambda a, b: (a & b) == b)
    return validate_semilattice(poset, 0)


def _canonical(size: int, leq) -> Tuple:
    best = None
    for perm in permutations(range(size)):
        key = tuple(leq[perm[i]][perm[j]] for i in range(size) for j in range(size))
        if best is None or key < best:
            best = key
    return best


def canonical_form(A: FiniteSemilattice) -> Tuple:
    return _canonical(A.size, A.poset.leq)


@lru_cache(maxsize=None)
def lattices_of_size(n: int) -> Tuple[FiniteSemilattice, ...]:
    """One lattice per isomorphism class, in a deterministic order."""
    if n < 1:
        return ()
    if n == 1:
        return (chain(1),)
    middle = list(range(1, n - 1))
    mid_pairs = list(combinations(middle, 2))
    seen = set()
    out = []
    for bits in product((False, True), repeat=len(mid_pairs)):
        pairs = [(0, j) for j in range(1, n)] + [(i, n - 1) for i in middle]
        pairs += [pr for pr, b in zip(mid_pairs, bits) if b]
        try:
            A = semilattice_from_pairs(n, pairs, top=n - 1)
        except (PosetError, MissingMeet):
            continue
        key = canonical_form(A)
        if key in seen:
            continue
        seen.add(key)
        out.append(A)
    return tuple(out)


def _named() -> List[Entry]:
    named = [Entry(f"chain{k}", chain(k)) for k in range(1, 7)]
    named += [Entry("diamond", diamond()), Entry("M3", m3()), Entry("N5", n5())]
    named += [Entry("free2", free_semilattice(2)), Entry("free3", free_semilattice(3))]
    return named


@lru_cache(maxsize=None)
def catalog(max_size: int = 5) -> Tuple[Entry, ...]:
    """All semilattices of size <= ``max_size``, one per isomorphism class.

    A generated structure isomorphic to a named one carries the first such name.
    """
    named = {}
    for e in _named():
        if e.lattice.size <= max_size:
            named.setdefault(canonical_form(e.lattice), e.name)
    out = []
    for n in range(1, max_size + 1):
        for k, A in enumerate(lattices_of_size(n)):
            out.append(Entry(named.get(canonical_form(A), f"L{n}_{k}"), A))
    return tuple(out)


def full_catalog() -> Tuple[Entry, ...]:
    """``catalog(5)`` extended by the named structures larger than five elements."""
    return catalog(5) + tuple(e for e in _named() if e.lattice.size > 5)


def named_structures() -> Tuple[Entry, ...]:
    return tuple(_named())


def by_name(name: str) -> FiniteSemilattice:
    for e in _named():
        if e.name == name:
            return e.lattice
    for e in catalog(6):
        if e.name == name:
            return e.lattice
    raise KeyError(name)


def distributive_catalog(max_size: int = 5) -> Tuple[Entry, ...]:
    return tuple(e for e in catalog(max_size) if is_distributive(e.lattice))


def implicative_catalog(max_size: int = 5) -> Tuple[Entry, ...]:
    return tuple(e for e in catalog(max_size) if implicative_witness(e.lattice) is not None)
