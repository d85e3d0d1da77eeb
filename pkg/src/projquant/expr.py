"""Surface syntax for symbols: a recursive-descent parser and a printer.

Grammar::

    expr     := term (('+' | '-') term)*
    term     := factor ('*' factor)*
    factor   := '-' factor | atom ('^' exponent)?
    atom     := rational | 'x'<int> | 'p'<int> | 'nu' | <base> | '(' expr ')'
    rational := int ('/' int)?
    exponent := int | '(' ['-'] int ['/' int] ')'

``p<i>`` is the fiber coordinate dual to ``x<i>``.  Rational and negative
exponents are accepted only directly on a named base (``H``, ``r2``); ``nu``
also takes negative integer exponents.  The printer emits text that parses
back to an equal symbol.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from .algebra import Poly, format_fraction
from .errors import ParseError
from .symbols import BaseTable, RadicalSymbol


# AST

@dataclass(frozen=True)
class Num:
    value: Fraction
    col: int


@dataclass(frozen=True)
class Var:
    kind: str  # "x" or "p"
    index: int
    col: int


@dataclass(frozen=True)
class Nu:
    col: int


@dataclass(frozen=True)
class BaseRef:
    name: str
    col: int


@dataclass(frozen=True)
class Neg:
    operand: object
    col: int


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    col: int


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: Fraction
    col: int


# lexer

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9]*)|(.))")


@dataclass(frozen=True)
class _Tok:
    kind: str  # "int", "name", "op", "end"
    text: str
    col: int


def _tokenize(text: str) -> List[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.lastindex is None:
            break
        col = m.start(m.lastindex) + 1
        if m.group(1) is not None:
            toks.append(_Tok("int", m.group(1), col))
        elif m.group(2) is not None:
            toks.append(_Tok("name", m.group(2), col))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", col)
            toks.append(_Tok("op", ch, col))
        pos = m.end()
    toks.append(_Tok("end", "", len(text) + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def accept(self, op: str) -> Optional[_Tok]:
        if self.tok.kind == "op" and self.tok.text == op:
            return self.take()
        return None

    def expect(self, op: str) -> _Tok:
        t = self.accept(op)
        if t is None:
            raise ParseError(f"expected {op!r}, found {self.tok.text or 'end of input'!r}", self.tok.col)
        return t

    def expect_int(self) -> _Tok:
        if self.tok.kind != "int":
            raise ParseError(f"expected an integer, found {self.tok.text or 'end of input'!r}", self.tok.col)
        return self.take()

    def parse(self):
        node = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.col)
        return node

    def expr(self):
        node = self.term()
        while True:
            t = self.accept("+") or self.accept("-")
            if t is None:
                return node
            node = BinOp(t.text, node, self.term(), t.col)

    def term(self):
        node = self.factor()
        while True:
            t = self.accept("*")
            if t is None:
                return node
            node = BinOp("*", node, self.factor(), t.col)

    def factor(self):
        t = self.accept("-")
        if t is not None:
            return Neg(self.factor(), t.col)
        node = self.atom()
        t = self.accept("^")
        if t is not None:
            node = Pow(node, self.exponent(), t.col)
        return node

    def exponent(self) -> Fraction:
        if self.tok.kind == "int":
            return Fraction(int(self.take().text))
        self.expect("(")
        sign = -1 if self.accept("-") else 1
        num = int(self.expect_int().text)
        den = 1
        if self.accept("/"):
            t = self.expect_int()
            den = int(t.text)
            if den == 0:
                raise ParseError("zero denominator", t.col)
        self.expect(")")
        return Fraction(sign * num, den)

    def atom(self):
        t = self.tok
        if t.kind == "int":
            self.take()
            value = Fraction(int(t.text))
            if self.accept("/"):
                d = self.expect_int()
                if int(d.text) == 0:
                    raise ParseError("zero denominator", d.col)
                value /= int(d.text)
            return Num(value, t.col)
        if t.kind == "name":
            self.take()
            m = re.fullmatch(r"([xp])(\d+)", t.text)
            if m:
                return Var(m.group(1), int(m.group(2)), t.col)
            if t.text == "nu":
                return Nu(t.col)
            return BaseRef(t.text, t.col)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected {t.text or 'end of input'!r}", t.col)


def parse(text: str):
    """Parse expression text into an AST."""
    return _Parser(text).parse()


def elaborate(ast, table: BaseTable) -> RadicalSymbol:
    """Turn an AST into a symbol over ``table`` (which fixes n and base names)."""
    n = table.n

    def go(node) -> RadicalSymbol:
        if isinstance(node, Num):
            return RadicalSymbol.const(table, node.value)
        if isinstance(node, Var):
            if not 1 <= node.index <= n:
                raise ParseError(f"index {node.index} out of range 1..{n}", node.col)
            p = Poly.x(n, node.index) if node.kind == "x" else Poly.xi(n, node.index)
            return RadicalSymbol.from_poly(table, p)
        if isinstance(node, Nu):
            return RadicalSymbol.from_poly(table, Poly.nu(n))
        if isinstance(node, BaseRef):
            if node.name not in table.names:
                raise ParseError(f"unknown name {node.name!r}", node.col)
            return RadicalSymbol.base_power(table, node.name, 1)
        if isinstance(node, Neg):
            return -go(node.operand)
        if isinstance(node, BinOp):
            a, b = go(node.left), go(node.right)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            return a * b
        if isinstance(node, Pow):
            e = node.exponent
            if isinstance(node.base, BaseRef):
                if node.base.name not in table.names:
                    raise ParseError(f"unknown name {node.base.name!r}", node.base.col)
                return RadicalSymbol.base_power(table, node.base.name, e)
            if isinstance(node.base, Nu) and e.denominator == 1:
                return RadicalSymbol.from_poly(table, Poly.nu(n, int(e)))
            if e.denominator != 1 or e < 0:
                raise ParseError(
                    f"exponent {format_fraction(e)} allowed only on a named base", node.col
                )
            return go(node.base) ** int(e)
        raise TypeError(f"unknown node {node!r}")

    return go(ast)


def parse_symbol(text: str, table: BaseTable) -> RadicalSymbol:
    return elaborate(parse(text), table)


# printing

def _power(name: str, e) -> str:
    e = Fraction(e)
    if e == 1:
        return name
    if e.denominator == 1 and e > 0:
        return f"{name}^{e.numerator}"
    return f"{name}^({format_fraction(e)})"


def _term_body(n: int, nu_pow: int, exps, extra: List[str]) -> List[str]:
    factors = []
    if nu_pow:
        factors.append(_power("nu", nu_pow))
    for i, e in enumerate(exps[:n], start=1):
        if e:
            factors.append(_power(f"x{i}", e))
    for i, e in enumerate(exps[n:], start=1):
        if e:
            factors.append(_power(f"p{i}", e))
    return factors + extra


def _signed_terms(p: Poly, extra: List[str]):
    n = p.n
    for nu_pow, exps, c in p.raw_terms():
        factors = _term_body(n, nu_pow, exps, extra)
        mag = abs(c)
        if mag != 1 or not factors:
            factors.insert(0, format_fraction(mag))
        yield c < 0, "*".join(factors)


def _join(items) -> str:
    out = ""
    for k, (neg, body) in enumerate(items):
        if k == 0:
            out = ("-" if neg else "") + body
        else:
            out += (" - " if neg else " + ") + body
    return out or "0"


def format_poly(p: Poly) -> str:
    return _join(list(_signed_terms(p, [])))


def format_symbol(s: RadicalSymbol) -> str:
    items = []
    zero = s.table.zero_exponent
    for e in sorted(s.sectors, key=lambda e: (e != zero, e)):
        p = s.sectors[e]
        radical = [_power(b.name, q) for b, q in zip(s.table.bases, e) if q]
        if not radical or len(p) == 1:
            items.extend(_signed_terms(p, radical))
        else:
            items.append((False, "(" + format_poly(p) + ")*" + "*".join(radical)))
    return _join(items)
