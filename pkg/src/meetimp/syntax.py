"""Formulas of the meet-implication language and its modal extensions.

Concrete syntax (ASCII)::

    formula := imp
    imp     := conj ("->" imp)?
    conj    := unary ("&" unary)*
    unary   := "[]" unary | "<m>" unary | "T" | ident | "(" formula ")"
    ident   := [a-z][a-zA-Z0-9_]*

``->`` is right-associative and binds loosest, ``&`` is left-associative,
and the two modal prefixes bind tightest.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Iterator, Mapping, Optional, Union


@dataclass(frozen=True)
class Top:
    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Letter:
    name: str

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Box:
    body: "Formula"

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Mon:
    body: "Formula"

    def __str__(self) -> str:
        return render(self)


Formula = Union[Top, Letter, And, Imp, Box, Mon]
Substitution = Mapping[str, Formula]

TOP = Top()


def iff(a: Formula, b: Formula) -> Formula:
    """``a <-> b`` as sugar for ``(a -> b) & (b -> a)``."""
    return And(Imp(a, b), Imp(b, a))


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(r"\s*(?:(->)|(&)|(\[\])|(<m>)|(\()|(\))|([a-z][a-zA-Z0-9_]*)|(T)(?![a-zA-Z0-9_]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastindex)
        kind = ("->", "&", "[]", "<m>", "(", ")", "ident", "T")[m.lastindex - 1]
        tokens.append((kind, m.group(m.lastindex), start))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind: str):
        tok = self.tokens[self.i]
        if tok[0] != kind:
            what = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise ParseError(f"expected {kind!r}, found {what}", tok[2])
        self.i += 1
        return tok

    def formula(self) -> Formula:
        left = self.conj()
        if self.peek()[0] == "->":
            self.i += 1
            return Imp(left, self.formula())
        return left

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek()[0] == "&":
            self.i += 1
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, value, pos = self.peek()
        if kind == "[]":
            self.i += 1
            return Box(self.unary())
        if kind == "<m>":
            self.i += 1
            return Mon(self.unary())
        if kind == "T":
            self.i += 1
            return TOP
        if kind == "ident":
            self.i += 1
            return Letter(value)
        if kind == "(":
            self.i += 1
            f = self.formula()
            self.take(")")
            return f
        what = "end of input" if kind == "eof" else repr(value)
        raise ParseError(f"expected a formula, found {what}", pos)


def parse(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    kind, value, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"trailing input {value!r}", pos)
    return f


_IMP, _CONJ, _UNARY = 0, 1, 2


def render(f: Formula) -> str:
    """Print ``f`` with the fewest parentheses that still parse back to ``f``."""
    return _render(f, _IMP)


def _render(f: Formula, ctx: int) -> str:
    if isinstance(f, Top):
        return "T"
    if isinstance(f, Letter):
        return f.name
    if isinstance(f, Box):
        return "[]" + _render(f.body, _UNARY)
    if isinstance(f, Mon):
        return "<m>" + _render(f.body, _UNARY)
    if isinstance(f, And):
        s = f"{_render(f.left, _CONJ)} & {_render(f.right, _UNARY)}"
        return s if ctx <= _CONJ else f"({s})"
    if isinstance(f, Imp):
        s = f"{_render(f.left, _CONJ)} -> {_render(f.right, _IMP)}"
        return s if ctx <= _IMP else f"({s})"
    raise TypeError(f"not a formula: {f!r}")


# `print` would shadow the builtin inside this module; export it under both names.
print_formula = render


def apply_substitution(s: Substitution, f: Formula) -> Formula:
    if isinstance(f, Letter):
        return s.get(f.name, f)
    if isinstance(f, Top):
        return f
    if isinstance(f, And):
        return And(apply_substitution(s, f.left), apply_substitution(s, f.right))
    if isinstance(f, Imp):
        return Imp(apply_substitution(s, f.left), apply_substitution(s, f.right))
    if isinstance(f, Box):
        return Box(apply_substitution(s, f.body))
    if isinstance(f, Mon):
        return Mon(apply_substitution(s, f.body))
    raise TypeError(f"not a formula: {f!r}")


def match_schema(schema: Formula, candidate: Formula) -> Optional[Dict[str, Formula]]:
    """First-order matching: letters of ``schema`` act as metavariables."""
    sub: Dict[str, Formula] = {}

    def go(s: Formula, c: Formula) -> bool:
        if isinstance(s, Letter):
            bound = sub.get(s.name)
            if bound is None:
                sub[s.name] = c
                return True
            return bound == c
        if type(s) is not type(c):
            return False
        if isinstance(s, Top):
            return True
        if isinstance(s, (And, Imp)):
            return go(s.left, c.left) and go(s.right, c.right)
        return go(s.body, c.body)

    return sub if go(schema, candidate) else None


def letters(f: Formula) -> frozenset:
    if isinstance(f, Letter):
        return frozenset([f.name])
    if isinstance(f, Top):
        return frozenset()
    if isinstance(f, (And, Imp)):
        return letters(f.left) | letters(f.right)
    return letters(f.body)


def depth(f: Formula) -> int:
    """Constructor depth: atoms have depth 0, every connective adds one."""
    if isinstance(f, (Top, Letter)):
        return 0
    if isinstance(f, (And, Imp)):
        return 1 + max(depth(f.left), depth(f.right))
    return 1 + depth(f.body)


def modal_depth(f: Formula) -> int:
    if isinstance(f, (Top, Letter)):
        return 0
    if isinstance(f, (And, Imp)):
        return max(modal_depth(f.left), modal_depth(f.right))
    return 1 + modal_depth(f.body)


def has_modality(f: Formula, kind=(Box, Mon)) -> bool:
    if isinstance(f, kind):
        return True
    if isinstance(f, (And, Imp)):
        return has_modality(f.left, kind) or has_modality(f.right, kind)
    if isinstance(f, (Box, Mon)):
        return has_modality(f.body, kind)
    return False


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, (And, Imp)):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, (Box, Mon)):
        yield from subformulas(f.body)


def formulas_up_to_depth(names, max_depth: int, modalities=()):
    """All formulas over ``names`` (plus T) of constructor depth <= max_depth.

    ``modalities`` is a subset of ``(Box, Mon)``. The output is ordered by
    depth, then by construction order, and contains no duplicates.
    """
    levels = [[TOP] + [Letter(n) for n in sorted(names)]]
    seen = list(levels[0])
    for _ in range(max_depth):
        new = []
        for op in modalities:
            new.extend(op(a) for a in seen)
        for a in seen:
            for b in seen:
                new.append(And(a, b))
                new.append(Imp(a, b))
        known = set(seen)
        fresh = []
        for g in new:
            if g not in known:
                known.add(g)
                fresh.append(g)
        seen = seen + fresh
    return seen
