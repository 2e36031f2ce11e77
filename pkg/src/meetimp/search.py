"""Frame enumeration over the catalog and bounded countermodel search."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterator, List, Optional, Sequence, Tuple

from .catalog import lattices_of_size
from .order import FiniteSemilattice, homomorphisms, implicative_witness
from .semantics import (
    BoxFrame,
    Frame,
    IFrame,
    Model,
    MonFrame,
    box_conditions,
    box_frame_from_gamma,
    denotation,
    iframe,
    nbhd_lattice,
    valuations,
)
from .syntax import Formula, has_modality, letters

MAX_WORLDS = 6
KINDS = ("i", "box", "mon")
SYSTEM_KINDS = {"mi": "i", "mibox": "box", "mimon": "mon"}


class SearchError(ValueError):
    pass


class GuardExceeded(SearchError):
    pass


def _kind(kind: str) -> str:
    k = kind.lower().replace("_", "")
    k = {"mi": "i", "mibox": "box", "mimon": "mon"}.get(k, k)
    if k not in KINDS:
        raise SearchError(f"unknown frame kind {kind!r}")
    return k


def _guard(max_worlds: int) -> None:
    if max_worlds < 1:
        raise SearchError("max_worlds must be at least 1")
    if max_worlds > MAX_WORLDS:
        raise GuardExceeded(f"frame enumeration is capped at {MAX_WORLDS} worlds")


@lru_cache(maxsize=None)
def implicative_bases(size: int) -> Tuple[IFrame, ...]:
    """Implicative semilattices of exactly ``size`` elements, one per isomorphism class."""
    return tuple(iframe(A) for A in lattices_of_size(size) if implicative_witness(A) is not None)


@lru_cache(maxsize=None)
def box_frames_on(base: IFrame) -> Tuple[BoxFrame, ...]:
    """Box frames generated from top- and meet-preserving maps ``x ↦ γ(x)``: ``R[x] = ↑γ(x)``."""
    return tuple(box_frame_from_gamma(base, g) for g in homomorphisms(base.algebra, base.algebra))


@lru_cache(maxsize=None)
def mon_frames_on(base: IFrame) -> Tuple[MonFrame, ...]:
    carriers, U = nbhd_lattice(base)
    return tuple(MonFrame(base, tuple(carriers[i] for i in h)) for h in homomorphisms(base.algebra, U))


def box_relations_brute_force(base: IFrame) -> List[frozenset]:
    """Every relation on the carrier that passes the B1–B4 conditions, by exhaustive enumeration."""
    A = base.algebra
    top = A.top
    # B1 fixes every pair touching the top; the remaining pairs are free.
    forced = frozenset([(x, top) for x in A.elements])
    pairs = [(x, y) for x in A.elements for y in A.elements if x != top and y != top]
    out = []
    for mask in range(1 << len(pairs)):
        R = forced | frozenset(p for i, p in enumerate(pairs) if mask >> i & 1)
        if all(v is None for v in box_conditions(base, R).values()):
            out.append(R)
    return out


def frames_on(base: IFrame, kind: str) -> Sequence[Frame]:
    kind = _kind(kind)
    if kind == "i":
        return (base,)
    if kind == "box":
        return box_frames_on(base)
    return mon_frames_on(base)


def enumerate_frames(kind: str, max_worlds: int) -> Iterator[Frame]:
    """Every frame of ``kind`` on catalog bases up to ``max_worlds``, by size then catalog index."""
    kind = _kind(kind)
    _guard(max_worlds)
    for n in range(1, max_worlds + 1):
        for base in implicative_bases(n):
            yield from frames_on(base, kind)


@dataclass(frozen=True)
class SearchSpec:
    system: str
    target: Formula
    max_worlds: int = 3
    letters: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.max_worlds < 1:
            raise SearchError("max_worlds must be at least 1")
        if self.letters is not None:
            object.__setattr__(self, "letters", tuple(self.letters))

    @property
    def kind(self) -> str:
        return _kind(self.system)

    @property
    def names(self) -> List[str]:
        return sorted(set(self.letters) if self.letters is not None else letters(self.target))


@dataclass(frozen=True)
class Countermodel:
    model: Model
    world: int


def find_countermodel(spec: SearchSpec) -> Optional[Countermodel]:
    """First model and world, in canonical order, where ``spec.target`` fails.

    An empty result only means no countermodel exists within the bound.
    """
    kind = spec.kind
    if kind == "i" and has_modality(spec.target):
        raise SearchError("modal formula given for the modality-free system")
    names = spec.names
    for frame in enumerate_frames(kind, spec.max_worlds):
        full = frame.base.full
        for v in valuations(frame, names):
            m = Model(frame, v)
            d = denotation(m, spec.target)
            if d != full:
                return Countermodel(m, min(full - d))
    return None


@dataclass(frozen=True)
class ProbeReport:
    formula: Formula
    bound: int
    i_witness: Optional[Countermodel]
    box_witness: Optional[Countermodel]

    @property
    def agree(self) -> bool:
        return (self.i_witness is None) == (self.box_witness is None)

    def __bool__(self):
        return self.agree


def conservativity_probe(phi: Formula, bound: int = 3) -> ProbeReport:
    """Compare refutability of a modality-free formula over I-frames and over box frames."""
    if has_modality(phi):
        raise SearchError("conservativity probe needs a modality-free formula")
    i = find_countermodel(SearchSpec("mi", phi, bound))
    b = find_countermodel(SearchSpec("mibox", phi, bound))
    return ProbeReport(phi, bound, i, b)
