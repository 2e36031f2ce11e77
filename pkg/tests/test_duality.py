from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import brute_filters, small_frames
from meetimp import duality as D
from meetimp.catalog import distributive_catalog, implicative_catalog
from meetimp.order import build_filter_semilattice, chain, homomorphisms, semilattice_from_pairs
from meetimp.search import implicative_bases
from meetimp.semantics import (
    BoxFrame,
    Model,
    MonFrame,
    check_morphism,
    den_mon,
    denotation,
    iframe,
    leq_rel,
    make_model,
    validate_box_frame,
    validate_mon_frame,
    valuations,
)
from meetimp.syntax import And, Box, Imp, Letter, Mon, formulas_up_to_depth

p, q = Letter("p"), Letter("q")
C3 = iframe(chain(3))
C2 = iframe(chain(2))
W, T = 0, 1
ORDER3 = validate_box_frame(C3, leq_rel(C3.algebra))
TWO = validate_box_frame(C2, [(W, T), (T, T)])
POINT = validate_box_frame(iframe(chain(1)), [(0, 0)])
FRAMES = {k: small_frames(k, 4) for k in ("i", "box", "mon")}


def up(A, x):
    return frozenset(A.up(x))


def elements(flt_list):
    return [f.elements for f in flt_list]


# ---------------------------------------------------------------- algebras


def test_islo_validation():
    A = chain(3)
    D.validate_islo(A, (0, 1, 2))
    with pytest.raises(D.NotISLO):
        D.validate_islo(A, (0, 1, 1))  # top not fixed
    with pytest.raises(D.NotISLO):
        D.validate_islo(A, (0, 2))
    with pytest.raises(D.NotISLO):
        D.validate_mon_algebra(A, (2, 0, 1))  # mon(0) <= mon(1) fails


def test_islo_json_roundtrip():
    a = D.validate_islo(chain(3), (1, 1, 2))
    b = D.islo_from_json(D.islo_to_json(a))
    assert b.box == a.box and b.algebra.size == 3


def test_box_tables_are_meet_preserving_maps():
    for e in implicative_catalog(4):
        A = e.lattice
        tables = D.box_tables(A)
        brute = [t for t in product(A.elements, repeat=A.size) if t[A.top] == A.top and all(
            t[A.meet(x, y)] == A.meet(t[x], t[y]) for x in A.elements for y in A.elements)]
        assert sorted(tables) == sorted(brute)


# ---------------------------------------------------------------- m_box and complex algebras


def test_m_box_examples():
    assert D.m_box(ORDER3, up(C3.algebra, 1)).elements == {1, 2}
    assert D.m_box(TWO, {T}).elements == {W, T}
    for f in FRAMES["box"]:
        assert D.m_box(f, f.base.full).elements == f.base.full


def test_m_box_matches_definition_and_preserves_meets():
    for f in FRAMES["box"]:
        fs = f.base.filters
        for a in fs:
            want = frozenset(x for x in f.worlds if all(y in a for (x2, y) in f.R if x2 == x))
            assert D.m_box(f, a).elements == want
            assert want in brute_filters(f.algebra)
        for a, b in product(fs, repeat=2):
            assert D.m_box(f, a & b).elements == D.m_box(f, a).elements & D.m_box(f, b).elements


def test_complex_algebra_examples():
    c = D.complex_algebra(ORDER3)
    assert c.algebra.size == 3 and c.box == tuple(range(3))
    assert D.complex_algebra(POINT).algebra.size == 1


@pytest.mark.parametrize("kind", ["box", "mon"])
def test_complex_algebras_are_valid(kind):
    for f in small_frames(kind, 4):
        if kind == "box":
            c = D.complex_algebra(f)
            D.validate_islo(c.algebra, c.box)
        else:
            c = D.complex_mon_algebra(f)
            D.validate_mon_algebra(c.algebra, c.mon)


# ---------------------------------------------------------------- dual frames and round trips


def test_dual_frame_of_identity_is_inclusion():
    a = D.validate_islo(chain(3), (0, 1, 2))
    d = D.dual_frame(a)
    fs = elements(build_filter_semilattice(chain(3)).filters)
    assert d.R == frozenset((i, j) for i, j in product(range(3), repeat=2) if fs[i] <= fs[j])


def test_dual_frame_of_constant_top_box():
    A = chain(3)
    a = D.validate_islo(A, (2, 2, 2))
    d = D.dual_frame(a)
    FA = build_filter_semilattice(A)
    full = FA.index[frozenset(A.elements)]
    # Every trace is the whole algebra, so each filter sees only the full filter.
    assert d.R == frozenset((i, full) for i in range(len(FA.filters)))
    validate_box_frame(d.base, d.R)


def test_dual_frame_of_point():
    a = D.validate_islo(chain(1), (0,))
    assert D.dual_frame(a).algebra.size == 1


def test_dual_frames_validate():
    for e in implicative_catalog(4):
        for t in D.box_tables(e.lattice):
            d = D.dual_frame(D.validate_islo(e.lattice, t))
            validate_box_frame(d.base, d.R)


def test_roundtrip_examples():
    rep = D.duality_roundtrip_algebra(D.validate_islo(chain(3), (0, 1, 2)))
    assert sorted(rep.witness) == [0, 1, 2]
    for f in (ORDER3, TWO, POINT):
        D.duality_roundtrip_frame(f)
    D.duality_roundtrip_algebra(D.validate_islo(chain(1), (0,)))


def test_roundtrip_witness_is_eta():
    a = D.validate_islo(chain(3), (1, 1, 2))
    rep = D.duality_roundtrip_algebra(a)
    C = D.complex_algebra(D.dual_frame(a))
    FA = build_filter_semilattice(a.algebra)
    for x in a.algebra.elements:
        assert C.labels[rep.witness[x]] == frozenset(i for i, f in enumerate(FA.filters) if x in f)


def test_frame_roundtrip_on_small_frames():
    for f in small_frames("box", 4):
        rep = D.duality_roundtrip_frame(f)
        assert len(set(rep.witness)) == f.algebra.size


# ---------------------------------------------------------------- dialgebra view


def test_dialgebra_roundtrip():
    for kind in ("box", "mon"):
        for f in FRAMES[kind]:
            g = D.frame_of(D.dialgebra_of(f))
            assert g.key() == f.key()


def test_dialgebra_violation():
    bad = D.Dialgebra(C2, (frozenset([T]), frozenset([W, T])), "box")
    assert bad.violation() == ("top", T)
    with pytest.raises(D.DualityError):
        D.frame_of(bad)
    with pytest.raises(D.DualityError):
        D.dialgebra_of(C2)


def test_wedge_variants_agree_on_distributive_bases():
    for e in distributive_catalog(5):
        A = e.lattice
        fs = elements(build_filter_semilattice(A).filters)
        for a, b in product(fs, repeat=2):
            assert D.wedge(A, a, b) == D.wedge_pointwise(A, a, b)


def test_wedge_is_least_common_superfilter():
    for e in implicative_catalog(4):
        A = e.lattice
        fs = elements(build_filter_semilattice(A).filters)
        for a, b in product(fs, repeat=2):
            uppers = [c for c in fs if a <= c and b <= c]
            assert D.wedge(A, a, b) == min(uppers, key=len)


# ---------------------------------------------------------------- tau and rho-flat


def test_tau_box_examples():
    A = chain(3)
    FA = build_filter_semilattice(A)
    assert D.tau_box(A, {2}) == frozenset(range(len(FA.filters)))
    assert D.tau_box(A, {0, 1, 2}) == {FA.index[frozenset(A.elements)]}
    assert D.rho_flat_box(A, {2}) and D.rho_flat_box(A, {0, 1, 2})


def test_rho_flat_inverts_tau_on_small_algebras():
    for e in implicative_catalog(4):
        A = e.lattice
        assert all(D.rho_flat_box(A, t) for t in D.box_traces(A))
        for t in D.mon_traces(A):
            assert D.rho_flat_mon(A, t)
            assert D.tau_mon(A, t).collapsed


def _preserves_imp(h, a, b):
    return all(h[a.imp(x, y)] == b.imp(h[x], h[y]) for x in a.worlds for y in a.worlds)


def _hom_pairs(max_size, implicative=False):
    bases = [b for n in range(1, max_size + 1) for b in implicative_bases(n)]
    for a in bases:
        for b in bases:
            for h in homomorphisms(a.algebra, b.algebra):
                if not implicative or _preserves_imp(h, a, b):
                    yield h, a.algebra, b.algebra


def test_tau_box_naturality():
    count = 0
    for h, A, B in _hom_pairs(4, implicative=True):
        for t in D.box_traces(B):
            assert D.tau_box_natural(h, A, B, t)
            count += 1
    assert count > 30


def test_tau_box_naturality_needs_implication():
    # 3-chain onto 2-chain collapsing the bottom two: 1->0 is 0 but h(1)->h(0) is the top.
    A, B, h = chain(3), chain(2), (0, 0, 1)
    assert not _preserves_imp(h, iframe(A), iframe(B))
    assert not D.tau_box_natural(h, A, B, {1})


def test_tau_mon_naturality():
    count = 0
    for h, A, B in _hom_pairs(3):
        for t in D.mon_traces(B):
            assert D.tau_mon_natural(h, A, B, t)
            count += 1
    assert count > 30


def test_g_functoriality():
    frames = FRAMES["i"]
    checked = 0
    for s, m, t in product(frames, repeat=3):
        for h1 in D.frame_morphisms(s, m):
            for h2 in D.frame_morphisms(m, t):
                assert D.g_functoriality(h1, h2, s, m, t)
                checked += 1
    assert checked > 10


# ---------------------------------------------------------------- filter extensions


@pytest.mark.parametrize("kind", ["i", "box", "mon"])
def test_eta_is_an_isomorphism(kind):
    for f in FRAMES[kind]:
        ext = D.filter_extension(f)
        assert sorted(ext.eta) == list(range(len(ext.worlds)))
        assert check_morphism(kind, ext.eta, f, ext.frame)


def test_extension_examples():
    ext = D.filter_extension(ORDER3)
    assert ext.frame.algebra.size == 3 and check_morphism("box", ext.eta, ORDER3, ext.frame)
    assert D.filter_extension(POINT).frame.algebra.size == 1
    # Neighbourhoods of principal filters containing each world make <m> the identity.
    fs = C3.filters
    ident = validate_mon_frame(C3, [frozenset(a for a in fs if x in a) for x in C3.worlds])
    for a in fs:
        assert den_mon(ident, a) == a
    ext = D.filter_extension(ident)
    assert check_morphism("mon", ext.eta, ident, ext.frame)


@pytest.mark.parametrize("kind", ["i", "box", "mon"])
def test_extension_preserves_theories(kind):
    ops = {"i": (), "box": (Box,), "mon": (Mon,)}[kind]
    pool = formulas_up_to_depth(("p",), 2, ops)
    for f in FRAMES[kind]:
        for v in valuations(f, ["p"]):
            m = Model(f, v)
            mx, eta = D.extend_model(m)
            for phi in pool:
                d, dx = denotation(m, phi), denotation(mx, phi)
                assert all((x in d) == (eta[x] in dx) for x in f.worlds)


def test_mon_extension_soundness_and_collapse():
    phi, psi = Mon(And(p, q)), Mon(p)
    for f in FRAMES["mon"]:
        assert D.mon_tier_collapse(f)
        ext = D.filter_extension(f).frame
        for v in valuations(ext, ["p", "q"]):
            m = Model(ext, v)
            assert denotation(m, phi) <= denotation(m, psi)


# ---------------------------------------------------------------- equivalences


def test_logical_equivalence_examples():
    m = make_model(C3, {"p": up(C3.algebra, 1)})
    assert D.logical_equivalence(m, m, 1, 1)
    assert not D.logical_equivalence(m, m, 0, 2)


def test_theory_pairs_match_formula_pool():
    # Conjunction costs no depth, so the depth-1 pairs include every conjunction of depth-1 formulas.
    m = make_model(ORDER3, {"p": up(C3.algebra, 1)})
    pairs = D.theory_pairs(m, m, 1)
    for phi in formulas_up_to_depth(("p",), 1, (Box,)):
        d = denotation(m, phi)
        assert (d, d) in pairs


def test_behavioural_equivalence_examples():
    m = make_model(C3, {"p": up(C3.algebra, 1)})
    r = D.behavioural_equivalence(m, m, 1, 1, bound=3)
    assert r and r.h1[1] == r.h2[1]
    r = D.behavioural_equivalence(m, m, 0, 2, bound=6)
    assert not r and r.exhausted_bound
    with pytest.raises(D.BoundTooSmall):
        D.behavioural_equivalence(m, m, 0, 0, bound=0)


def test_behavioural_equivalence_of_isomorphic_copies():
    # A relabelled copy of the 3-chain: 2 < 0 < 1.
    perm = (2, 0, 1)  # world x of the original is world perm[x] of the copy
    copy = iframe(semilattice_from_pairs(3, [(2, 0), (0, 1), (2, 1)]))
    R = frozenset((perm[x], perm[y]) for x, y in ORDER3.R)
    fc = validate_box_frame(copy, R)
    m1 = make_model(ORDER3, {"p": {1, 2}})
    m2 = make_model(fc, {"p": {perm[1], perm[2]}})
    for x in range(3):
        r = D.behavioural_equivalence(m1, m2, x, perm[x], bound=3)
        assert r
        assert r.target.value("p") is not None
    assert not D.behavioural_equivalence(m1, m2, 0, perm[2], bound=3)


def test_behavioural_equivalence_needs_same_kind():
    with pytest.raises(D.DualityError):
        D.behavioural_equivalence(Model(C2), Model(TWO), 0, 0)


@given(st.sampled_from(FRAMES["box"]), st.data())
def test_behavioural_implies_logical(frame, data):
    v = {"p": data.draw(st.sampled_from(frame.base.filters))}
    m = Model(frame, v)
    x1 = data.draw(st.sampled_from(list(frame.worlds)))
    x2 = data.draw(st.sampled_from(list(frame.worlds)))
    if D.behavioural_equivalence(m, m, x1, x2, bound=3):
        assert D.logical_equivalence(m, m, x1, x2, depth=3)
