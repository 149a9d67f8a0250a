"""LTL abstract syntax, a small recursive-descent parser and negation normal form.

Grammar (lowest to highest precedence)::

    expr    := or ('->' expr)?
    or      := and ('||' and)*
    and     := until ('&&' until)*
    until   := unary ('U' until)?
    unary   := ('!' | 'X' | 'F' | 'G' | '<>' | '[]') unary | primary
    primary := 'true' | 'false' | IDENT | '(' expr ')'

``F``/``<>`` and ``G``/``[]`` are sugar: ``F a`` is ``true U a`` and ``G a`` is
``!(true U !a)``.  Release only appears after :func:`to_nnf`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, repr=False)
class TrueF(Formula):
    pass


@dataclass(frozen=True, repr=False)
class FalseF(Formula):
    pass


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    name: str


@dataclass(frozen=True, repr=False)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True, repr=False)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Next(Formula):
    arg: Formula


@dataclass(frozen=True, repr=False)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Release(Formula):
    left: Formula
    right: Formula


for _cls in (TrueF, FalseF, Atom, Not, And, Or, Next, Until, Release):
    _cls.__repr__ = lambda self: f"<{to_text(self)}>"

TRUE = TrueF()
FALSE = FalseF()


def Eventually(f: Formula) -> Formula:
    return Until(TRUE, f)


def Always(f: Formula) -> Formula:
    return Not(Until(TRUE, Not(f)))


def Implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def conjoin(parts) -> Formula:
    """Left-nested conjunction skipping ``true`` parts; ``true`` if nothing is left."""
    result = None
    for p in parts:
        if isinstance(p, TrueF):
            continue
        result = p if result is None else And(result, p)
    return TRUE if result is None else result


class LtlSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class NextInTaskError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(?P<op>->|\|\||&&|<>|\[\]|[!()])|(?P<ident>[A-Za-z][A-Za-z0-9_]*))")
_UNARY = {"!", "X", "F", "G", "<>", "[]"}


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise LtlSyntaxError(f"unexpected character {text[bad]!r}", bad)
        kind = "op" if m.group("op") else "ident"
        tokens.append((m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("<eof>", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message):
        tok, pos = self.tokens[self.i]
        if tok == "<eof>":
            message = f"{message}, got end of input"
        else:
            message = f"{message}, got {tok!r}"
        raise LtlSyntaxError(message, pos)

    def parse(self) -> Formula:
        f = self.expr()
        if self.peek() != "<eof>":
            self.fail("expected end of input")
        return f

    def expr(self):
        left = self.or_()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.expr())
        return left

    def or_(self):
        left = self.and_()
        while self.peek() == "||":
            self.take()
            left = Or(left, self.and_())
        return left

    def and_(self):
        left = self.until()
        while self.peek() == "&&":
            self.take()
            left = And(left, self.until())
        return left

    def until(self):
        left = self.unary()
        if self.peek() == "U":
            self.take()
            return Until(left, self.until())
        return left

    def unary(self):
        tok = self.peek()
        if tok in _UNARY:
            self.take()
            arg = self.unary()
            if tok == "!":
                return Not(arg)
            if tok == "X":
                return Next(arg)
            if tok in ("F", "<>"):
                return Eventually(arg)
            return Always(arg)
        return self.primary()

    def primary(self):
        tok, _ = self.tokens[self.i]
        if tok == "(":
            self.take()
            f = self.expr()
            if self.peek() != ")":
                self.fail("expected ')'")
            self.take()
            return f
        if tok == "true":
            self.take()
            return TRUE
        if tok == "false":
            self.take()
            return FALSE
        if tok != "<eof>" and tok not in ("U",) and re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", tok):
            self.take()
            return Atom(tok)
        self.fail("expected a formula")


def parse(text: str, *, task: bool = False) -> Formula:
    """Parse ``text``; with ``task=True`` the next operator is rejected."""
    f = _Parser(text).parse()
    if task and has_next(f):
        raise NextInTaskError(f"task formulas may not use the next operator: {text!r}")
    return f


RESERVED = frozenset({"true", "false", "U", "X", "F", "G"})


def children(f: Formula) -> tuple:
    if isinstance(f, (Not, Next)):
        return (f.arg,)
    if isinstance(f, (And, Or, Until, Release)):
        return (f.left, f.right)
    return ()


def subformulas(f: Formula):
    """All distinct subformulas, children before parents."""
    seen = {}
    stack = [(f, False)]
    while stack:
        g, expanded = stack.pop()
        if g in seen:
            continue
        if expanded:
            seen[g] = None
            continue
        stack.append((g, True))
        for c in reversed(children(g)):
            if c not in seen:
                stack.append((c, False))
    return list(seen)


def atoms(f: Formula) -> frozenset:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Atom))


def has_next(f: Formula) -> bool:
    return any(isinstance(g, Next) for g in subformulas(f))


def depth(f: Formula) -> int:
    cs = children(f)
    return 0 if not cs else 1 + max(depth(c) for c in cs)


def substitute(f: Formula, mapping: dict) -> Formula:
    """Replace atoms by name; unknown atoms are kept."""
    if isinstance(f, Atom):
        return mapping.get(f.name, f)
    if isinstance(f, (Not, Next)):
        return type(f)(substitute(f.arg, mapping))
    if isinstance(f, (And, Or, Until, Release)):
        return type(f)(substitute(f.left, mapping), substitute(f.right, mapping))
    return f


def to_nnf(f: Formula) -> Formula:
    """Push negations down to atoms, introducing Release as the dual of Until."""
    return _nnf(f, False)


def _nnf(f: Formula, neg: bool) -> Formula:
    if isinstance(f, TrueF):
        return FALSE if neg else TRUE
    if isinstance(f, FalseF):
        return TRUE if neg else FALSE
    if isinstance(f, Atom):
        return Not(f) if neg else f
    if isinstance(f, Not):
        return _nnf(f.arg, not neg)
    if isinstance(f, Next):
        return Next(_nnf(f.arg, neg))
    a, b = _nnf(f.left, neg), _nnf(f.right, neg)
    if isinstance(f, And):
        return Or(a, b) if neg else And(a, b)
    if isinstance(f, Or):
        return And(a, b) if neg else Or(a, b)
    if isinstance(f, Until):
        return Release(a, b) if neg else Until(a, b)
    if isinstance(f, Release):
        return Until(a, b) if neg else Release(a, b)
    raise TypeError(f"not a formula: {f!r}")


def is_nnf(f: Formula) -> bool:
    return all(not isinstance(g, Not) or isinstance(g.arg, Atom) for g in subformulas(f))


# printing -------------------------------------------------------------------

_PREC = {"->": 1, "||": 2, "&&": 3, "U": 4, "unary": 5, "atom": 6}


def _sugar(f):
    """Recognise F/G sugar so printing round-trips through the parser."""
    if isinstance(f, Until) and isinstance(f.left, TrueF):
        return "F", f.right
    if (isinstance(f, Not) and isinstance(f.arg, Until) and isinstance(f.arg.left, TrueF)
            and isinstance(f.arg.right, Not)):
        return "G", f.arg.right.arg
    return None


def to_text(f: Formula) -> str:
    text, _ = _show(f)
    return text


def _wrap(child, min_prec):
    text, prec = _show(child)
    return f"({text})" if prec < min_prec else text


def _show(f):
    if isinstance(f, TrueF):
        return "true", _PREC["atom"]
    if isinstance(f, FalseF):
        return "false", _PREC["atom"]
    if isinstance(f, Atom):
        return f.name, _PREC["atom"]
    sugar = _sugar(f)
    if sugar is not None:
        op, arg = sugar
        return f"{op} {_wrap(arg, _PREC['unary'])}", _PREC["unary"]
    if isinstance(f, Not):
        return f"!{_wrap(f.arg, _PREC['unary'])}", _PREC["unary"]
    if isinstance(f, Next):
        return f"X {_wrap(f.arg, _PREC['unary'])}", _PREC["unary"]
    if isinstance(f, And):
        return f"{_wrap(f.left, _PREC['&&'])} && {_wrap(f.right, _PREC['&&'] + 1)}", _PREC["&&"]
    if isinstance(f, Or):
        return f"{_wrap(f.left, _PREC['||'])} || {_wrap(f.right, _PREC['||'] + 1)}", _PREC["||"]
    if isinstance(f, Until):
        return f"{_wrap(f.left, _PREC['U'] + 1)} U {_wrap(f.right, _PREC['U'])}", _PREC["U"]
    if isinstance(f, Release):
        inner = Until(_nnf(f.left, True), _nnf(f.right, True))
        return f"!{_wrap(inner, _PREC['unary'])}", _PREC["unary"]
    raise TypeError(f"not a formula: {f!r}")
