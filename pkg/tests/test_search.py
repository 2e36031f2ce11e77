from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import formulas
from meetimp import hilbert as H
from meetimp.order import chain, implicative_witness, is_distributive
from meetimp.catalog import lattices_of_size
from meetimp.search import (
    GuardExceeded,
    SearchError,
    SearchSpec,
    box_frames_on,
    box_relations_brute_force,
    conservativity_probe,
    enumerate_frames,
    find_countermodel,
    implicative_bases,
    mon_frames_on,
)
from meetimp.semantics import BoxFrame, IFrame, MonFrame, denotation, mon_conditions, validate_box_frame
from meetimp.syntax import Box, Imp, Letter, parse

p, q = Letter("p"), Letter("q")


def test_single_world_i_frames():
    frames = list(enumerate_frames("i", 1))
    assert len(frames) == 1 and isinstance(frames[0], IFrame) and frames[0].algebra.size == 1


def test_i_frames_up_to_three():
    frames = list(enumerate_frames("mi", 3))
    assert [f.algebra.size for f in frames] == [1, 2, 3]
    for n in (1, 2, 3):
        impl = [A for A in lattices_of_size(n) if implicative_witness(A) is not None]
        assert len(impl) == len([A for A in lattices_of_size(n) if is_distributive(A)])
        assert len(implicative_bases(n)) == len(impl)


def test_guard_and_bad_kind():
    with pytest.raises(GuardExceeded):
        list(enumerate_frames("box", 7))
    with pytest.raises(SearchError):
        list(enumerate_frames("box", 0))
    with pytest.raises(SearchError):
        list(enumerate_frames("diamond", 2))
    with pytest.raises(SearchError):
        SearchSpec("mi", p, max_worlds=0)


def test_box_frames_on_two_chain():
    base = implicative_bases(2)[0]
    frames = box_frames_on(base)
    # gamma(top) = {top}; gamma(w) ranges over both filters.
    assert sorted(sorted(f.R) for f in frames) == sorted([[(0, 0), (0, 1), (1, 1)], [(0, 1), (1, 1)]])
    assert sorted(f.R for f in frames) == sorted(box_relations_brute_force(base))


@pytest.mark.parametrize("size", [1, 2, 3])
def test_box_enumeration_matches_relations(size):
    for base in implicative_bases(size):
        assert {f.R for f in box_frames_on(base)} == set(box_relations_brute_force(base))
        for f in box_frames_on(base):
            validate_box_frame(base, f.R)


@pytest.mark.parametrize("size", [1, 2, 3])
def test_mon_enumeration_matches_brute_force(size):
    for base in implicative_bases(size):
        fs = base.filters
        upclosed = []
        for mask in range(1 << len(fs)):
            c = frozenset(fs[i] for i in range(len(fs)) if mask >> i & 1)
            if all(b in c for a in c for b in fs if a <= b):
                upclosed.append(c)
        brute = {nb for nb in product(upclosed, repeat=base.algebra.size) if mon_conditions(base, nb) is None}
        assert {f.nbhd for f in mon_frames_on(base)} == brute


def test_enumeration_is_deterministic():
    a = [f.key() for f in enumerate_frames("box", 4)]
    b = [f.key() for f in enumerate_frames("box", 4)]
    assert a == b
    sizes = [k[0].size for k in a]
    assert sizes == sorted(sizes)


def test_peirce_countermodel():
    cm = find_countermodel(SearchSpec("mi", parse("((p->q)->p)->p"), 3))
    assert cm is not None
    A = cm.model.frame.algebra
    assert A.size == 3 and A.poset.pairs() == chain(3).poset.pairs()
    assert cm.world == 0
    assert cm.model.value("p") == {1, 2} and cm.model.value("q") == {2}


def test_box_reflexivity_countermodel():
    cm = find_countermodel(SearchSpec("mibox", Imp(Box(p), p), 2))
    assert isinstance(cm.model.frame, BoxFrame)
    assert cm.model.frame.R == frozenset([(0, 1), (1, 1)])
    assert cm.world == 0 and cm.model.value("p") == {1}


def test_identity_has_no_countermodel():
    for n in (1, 3, 5):
        assert find_countermodel(SearchSpec("mi", Imp(p, p), n)) is None


def test_modal_target_rejected_for_plain_system():
    with pytest.raises(SearchError):
        find_countermodel(SearchSpec("mi", Box(p), 2))


def test_explicit_letters_extend_the_sweep():
    spec = SearchSpec("mi", p, 2, letters=("q", "p"))
    assert spec.names == ["p", "q"]
    cm = find_countermodel(spec)
    assert cm.world not in denotation(cm.model, p)


def test_countermodels_really_refute():
    for src in ("p -> q", "(p->q)->p", "((p->q)->q)->p", "(q->p)->(p->q)"):
        f = parse(src)
        cm = find_countermodel(SearchSpec("mi", f, 3))
        assert cm is not None and cm.world not in denotation(cm.model, f)


@settings(max_examples=25)
@given(formulas(("p", "q"), ("mon",), max_leaves=5))
def test_search_is_deterministic(phi):
    a = find_countermodel(SearchSpec("mimon", phi, 3))
    b = find_countermodel(SearchSpec("mimon", phi, 3))
    assert (a is None) == (b is None)
    if a is not None:
        assert a.world == b.world and a.model.frame.key() == b.model.frame.key()
        assert dict(a.model.valuation) == dict(b.model.valuation)


def test_conservativity_probe_examples():
    rep = conservativity_probe(parse("((p->q)->p)->p"), 3)
    assert rep.agree and rep.i_witness is not None and rep.box_witness is not None
    for src in ("p -> (q -> p)", "p -> (q -> (p & q))"):
        rep = conservativity_probe(parse(src), 3)
        assert rep and rep.i_witness is None and rep.box_witness is None
    with pytest.raises(SearchError):
        conservativity_probe(Box(p))


@settings(max_examples=30)
@given(formulas(("p", "q"), max_leaves=6))
def test_conservativity_probe_agrees(phi):
    assert conservativity_probe(phi, 3).agree


@pytest.mark.parametrize("sys", [H.MI, H.MI_BOX, H.MI_MON])
def test_theorems_never_get_countermodels(sys):
    th = H.enumerate_theorems(sys, ("p",), 3)
    kind = {"MI": "mi", "MI_Box": "mibox", "MI_Mon": "mimon"}[sys.tag]
    for f in th.formulas:
        assert find_countermodel(SearchSpec(kind, f, 3)) is None, f
