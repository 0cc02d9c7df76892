"""Recursive-descent parser for scalar scene expressions, evaluated as jets.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ('+' | '-') factor | base ('^' integer)?
    base   := number | x0..x3 | func '(' expr ')' | '(' expr ')'
    func   := exp | ln | sqrt | sin | cos
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from ..calculus import jets as J
from ..fields import Field

FUNCS = {"exp": J.exp, "ln": J.log, "sqrt": J.sqrt, "sin": J.sin, "cos": J.cos}
VARS = {"x0": 0, "x1": 1, "x2": 2, "x3": 3}

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
                    r"|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))")


class ExpressionError(ValueError):
    """Syntax error or unknown identifier, with the offending position."""

    def __init__(self, msg: str, src: str = "", pos: int | None = None):
        self.pos = pos
        self.src = src
        where = f" at position {pos}" if pos is not None else ""
        super().__init__(f"{msg}{where} in {src!r}" if src else f"{msg}{where}")


class DomainError(ValueError):
    """ln or sqrt evaluated outside its real domain."""


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(src: str) -> list:
    out, pos = [], 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            raise ExpressionError(f"unexpected character {src[pos:].lstrip()[:1]!r}", src,
                                  len(src) - len(src[pos:].lstrip()))
        kind = m.lastgroup
        start = m.start(kind)
        out.append(Token(kind, m.group(kind), start))
        pos = m.end()
    out.append(Token("end", "", len(src)))
    return out


class Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = tokenize(src)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def take(self, text: str | None = None) -> Token:
        t = self.tok
        if text is not None and t.text != text:
            found = t.text or "end of input"
            raise ExpressionError(f"expected {text!r}, found {found!r}", self.src, t.pos)
        self.i += 1
        return t

    def parse(self):
        node = self.expr()
        if self.tok.kind != "end":
            raise ExpressionError(f"unexpected {self.tok.text!r}", self.src, self.tok.pos)
        return node

    def expr(self):
        node = self.term()
        while self.tok.text in ("+", "-"):
            op = self.take().text
            node = (op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.tok.text in ("*", "/"):
            op = self.take().text
            node = (op, node, self.factor())
        return node

    def factor(self):
        if self.tok.text in ("+", "-"):
            op = self.take().text
            inner = self.factor()
            return ("neg", inner) if op == "-" else inner
        node = self.base()
        if self.tok.text == "^":
            self.take()
            sign = -1 if self.tok.text == "-" and self.take() else 1
            t = self.tok
            if t.kind != "num" or not t.text.isdigit():
                raise ExpressionError("exponent must be an integer", self.src, t.pos)
            self.take()
            node = ("pow", node, sign * int(t.text))
        return node

    def base(self):
        t = self.tok
        if t.kind == "num":
            self.take()
            return ("num", float(t.text))
        if t.kind == "name":
            self.take()
            if t.text in VARS:
                return ("var", VARS[t.text])
            if t.text in FUNCS:
                self.take("(")
                arg = self.expr()
                self.take(")")
                return ("call", t.text, arg)
            raise ExpressionError(f"unknown identifier {t.text!r}", self.src, t.pos)
        if t.text == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        found = t.text or "end of input"
        raise ExpressionError(f"unexpected {found!r}", self.src, t.pos)


def _evaluate(node, xs):
    kind = node[0]
    if kind == "num":
        return xs[0] * 0 + node[1]
    if kind == "var":
        return xs[node[1]]
    if kind == "neg":
        return -_evaluate(node[1], xs)
    if kind == "pow":
        b = _evaluate(node[1], xs)
        if node[2] < 0:
            return b.reciprocal() ** (-node[2])
        return b ** node[2] if node[2] else xs[0] * 0 + 1.0
    if kind == "call":
        arg = _evaluate(node[2], xs)
        v = arg.value
        if node[1] == "ln" and (abs(np.imag(v)) > 1e-14 or np.real(v) <= 0):
            raise DomainError(f"ln of non-positive value {np.real(v):.6g} at point {arg.point}")
        if node[1] == "sqrt" and (abs(np.imag(v)) > 1e-14 or np.real(v) < 0
                                  or (np.real(v) == 0 and arg.order > 0)):
            raise DomainError(f"sqrt of negative value {np.real(v):.6g} at point {arg.point}")
        return FUNCS[node[1]](arg)
    a, b = _evaluate(node[1], xs), _evaluate(node[2], xs)
    if kind == "+":
        return a + b
    if kind == "-":
        return a - b
    if kind == "*":
        return a * b
    if abs(b.value) == 0:
        raise DomainError(f"division by zero at point {b.point}")
    return a * b.reciprocal()


def parse_expression(src: str) -> Field:
    """Parse once; the returned Field evaluates jets at any point and order."""
    if not isinstance(src, str):
        src = repr(src)
    tree = Parser(src).parse()
    return Field(lambda xs: _evaluate(tree, xs), src)
