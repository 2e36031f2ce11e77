import pytest
from hypothesis import given

from helpers import formulas
from meetimp.syntax import (
    TOP,
    And,
    Box,
    Imp,
    Letter,
    Mon,
    ParseError,
    apply_substitution,
    depth,
    formulas_up_to_depth,
    letters,
    match_schema,
    modal_depth,
    parse,
    print_formula,
    render,
)

p, q, r = Letter("p"), Letter("q"), Letter("r")
a, b = Letter("a"), Letter("b")


def test_parse_top():
    assert parse("T") == TOP


def test_parse_h1_right_assoc():
    assert parse("p -> q -> p") == Imp(p, Imp(q, p))


def test_parse_box_tight():
    assert parse("[](p & q)") == Box(And(p, q))
    assert parse("[]p & q") == And(Box(p), q)
    assert parse("<m>p -> p") == Imp(Mon(p), p)


def test_conj_left_assoc_and_precedence():
    assert parse("p & q & r") == And(And(p, q), r)
    assert parse("p & q -> r") == Imp(And(p, q), r)
    assert parse("  p->(q  ) ") == Imp(p, q)


def test_identifiers():
    assert parse("x_1 & aB9") == And(Letter("x_1"), Letter("aB9"))
    with pytest.raises(ParseError):
        parse("Tx")


@pytest.mark.parametrize("bad", ["", "p ->", "(p", "p q", "->p", "P", "[]", "p & & q", "p)"])
def test_parse_errors_have_position(bad):
    with pytest.raises(ParseError) as exc:
        parse(bad)
    assert isinstance(exc.value.position, int)
    assert 0 <= exc.value.position <= len(bad)


def test_print_examples():
    assert render(Imp(p, Imp(q, p))) == "p -> q -> p"
    assert render(And(And(p, q), r)) == "p & q & r"
    assert print_formula(Box(Imp(p, q))) == "[](p -> q)"
    assert render(Imp(Imp(p, q), p)) == "(p -> q) -> p"
    assert render(And(p, And(q, r))) == "p & (q & r)"


def test_substitution_examples():
    assert apply_substitution({"p": TOP}, Imp(p, Imp(q, p))) == Imp(TOP, Imp(q, TOP))
    f = parse("[]p -> q & <m>r")
    assert apply_substitution({}, f) == f
    assert apply_substitution({"p": And(p, q)}, Imp(p, p)) == Imp(And(p, q), And(p, q))


def test_match_schema_examples():
    h1 = Imp(a, Imp(b, a))
    assert match_schema(h1, Imp(TOP, Imp(q, TOP))) == {"a": TOP, "b": q}
    assert match_schema(h1, Imp(p, Imp(q, r))) is None
    h3 = Imp(And(a, b), a)
    assert match_schema(h3, parse("(p & q) & r -> p & q")) == {"a": And(p, q), "b": r}


def test_depth_measures():
    assert modal_depth(TOP) == modal_depth(p) == 0
    assert depth(p) == 0
    assert depth(parse("p -> q -> p")) == 2
    assert modal_depth(parse("[](p -> <m>q) & []r")) == 2
    assert letters(parse("[]p -> q & T")) == {"p", "q"}


def test_formula_pool_is_deduplicated_and_bounded():
    pool = formulas_up_to_depth(["p"], 2, (Box,))
    assert len(pool) == len(set(pool))
    assert all(depth(f) <= 2 for f in pool)
    assert TOP in pool and Box(p) in pool and Imp(p, p) in pool


@given(formulas(modalities=("box", "mon"), max_leaves=12))
def test_roundtrip(f):
    assert parse(render(f)) == f


@given(formulas(modalities=("box",)), formulas(), formulas())
def test_match_after_substitution(schema, s1, s2):
    images = dict(zip(sorted(letters(schema)), [s1, s2, s1]))
    candidate = apply_substitution(images, schema)
    found = match_schema(schema, candidate)
    assert found is not None
    assert apply_substitution(found, schema) == candidate
    assert found == images


@given(formulas(modalities=("box", "mon")))
def test_modal_depth_nonnegative(f):
    assert 0 <= modal_depth(f) <= depth(f)
