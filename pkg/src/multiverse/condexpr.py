"""Boolean constraint expressions over decision assignments.

Grammar (lowest to highest precedence):

    expr    := term ("or" term)*
    term    := factor ("and" factor)*
    factor  := "not" factor | comparison
    cmp     := operand ("==" | "!=") operand | "(" expr ")"
    operand := identifier | "index" "(" identifier ")" | literal

Literals are quoted strings or bare numbers. Identifiers evaluate to the
option value a decision took in a given universe; ``index(D)`` evaluates to
the 0-based option index. A decision that is inactive in a universe compares
unequal to everything (``==`` is false, ``!=`` is true) and has index -1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import SpecError

# Sentinel for a decision that is not active in the assignment under test.
_ABSENT = object()


@dataclass(frozen=True)
class Ident:
    name: str


@dataclass(frozen=True)
class IndexOf:
    name: str


@dataclass(frozen=True)
class Lit:
    value: str


Operand = Union[Ident, IndexOf, Lit]


@dataclass(frozen=True)
class Cmp:
    op: str  # "==" | "!="
    lhs: Operand
    rhs: Operand


@dataclass(frozen=True)
class Not:
    arg: "Expr"


@dataclass(frozen=True)
class And:
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True)
class Or:
    lhs: "Expr"
    rhs: "Expr"


Expr = Union[Cmp, Not, And, Or]

_TOKEN_RE = re.compile(
    r"""\s*(?:
        (?P<op>==|!=)
      | (?P<lparen>\()
      | (?P<rparen>\))
      | (?P<string>"[^"]*"|'[^']*')
      | (?P<number>-?\d+(?:\.\d+)?)
      | (?P<word>[A-Za-z_]\w*)
    )""",
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise SpecError(f"constraint syntax error at position {pos}: {text[pos:]!r}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise SpecError(f"unexpected end of constraint expression: {self.text!r}")
        self.pos += 1
        return tok

    def expect(self, kind: str):
        tok = self.next()
        if tok[0] != kind:
            raise SpecError(
                f"constraint syntax error at position {tok[2]}: expected {kind}, got {tok[1]!r}"
            )
        return tok

    def parse(self) -> Expr:
        expr = self.expr()
        tok = self.peek()
        if tok is not None:
            raise SpecError(
                f"constraint syntax error at position {tok[2]}: trailing {tok[1]!r}"
            )
        return expr

    def expr(self) -> Expr:
        node = self.term()
        while self.peek() and self.peek()[:2] == ("word", "or"):
            self.next()
            node = Or(node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.peek() and self.peek()[:2] == ("word", "and"):
            self.next()
            node = And(node, self.factor())
        return node

    def factor(self) -> Expr:
        tok = self.peek()
        if tok and tok[:2] == ("word", "not"):
            self.next()
            return Not(self.factor())
        if tok and tok[0] == "lparen":
            self.next()
            node = self.expr()
            self.expect("rparen")
            return node
        return self.comparison()

    def comparison(self) -> Expr:
        lhs = self.operand()
        op = self.expect("op")[1]
        rhs = self.operand()
        return Cmp(op, lhs, rhs)

    def operand(self) -> Operand:
        tok = self.next()
        kind, value, start = tok
        if kind == "string":
            return Lit(value[1:-1])
        if kind == "number":
            return Lit(value)
        if kind == "word":
            if value == "index":
                self.expect("lparen")
                name = self.expect("word")[1]
                self.expect("rparen")
                return IndexOf(name)
            return Ident(value)
        raise SpecError(f"constraint syntax error at position {start}: {value!r}")


def parse_constraint_expr(text: str) -> Expr:
    """Parse a constraint condition into an expression tree."""
    return _Parser(text).parse()


def referenced_decisions(expr: Expr) -> set[str]:
    """All decision names mentioned anywhere in the expression."""
    if isinstance(expr, (Ident, IndexOf)):
        return {expr.name}
    if isinstance(expr, Lit):
        return set()
    if isinstance(expr, Cmp):
        return referenced_decisions(expr.lhs) | referenced_decisions(expr.rhs)
    if isinstance(expr, Not):
        return referenced_decisions(expr.arg)
    return referenced_decisions(expr.lhs) | referenced_decisions(expr.rhs)


def _as_number(value):
    try:
        return float(value)
    except (TypeError, ValueError):
        return None


def _values_equal(a, b) -> bool:
    if a is _ABSENT or b is _ABSENT:
        return False
    na, nb = _as_number(a), _as_number(b)
    if na is not None and nb is not None:
        return na == nb
    return str(a) == str(b)


def evaluate(expr: Expr, assignment: dict[str, tuple[int, str]]) -> bool:
    """Evaluate an expression against a (possibly partial) assignment.

    ``assignment`` maps decision name -> (option index, option value).
    """

    def operand_value(op: Operand):
        if isinstance(op, Lit):
            return op.value
        if isinstance(op, Ident):
            return assignment[op.name][1] if op.name in assignment else _ABSENT
        if isinstance(op, IndexOf):
            return assignment[op.name][0] if op.name in assignment else -1
        raise TypeError(op)

    if isinstance(expr, Cmp):
        eq = _values_equal(operand_value(expr.lhs), operand_value(expr.rhs))
        return eq if expr.op == "==" else not eq
    if isinstance(expr, Not):
        return not evaluate(expr.arg, assignment)
    if isinstance(expr, And):
        return evaluate(expr.lhs, assignment) and evaluate(expr.rhs, assignment)
    if isinstance(expr, Or):
        return evaluate(expr.lhs, assignment) or evaluate(expr.rhs, assignment)
    raise TypeError(expr)
