"""A small expression language for symbols.

Grammar::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("+" | "-") unary | power
    power   := primary ("^" ["+" | "-"] integer)?
    primary := number | "z" | "i" | "(" expr ")" | "exp" "(" expr ")"
             | "inv" "(" expr ")" | matrix
    matrix  := "[" row (";" row)* "]" | "[" "[" row "]" ("," "[" row "]")* "]"
    row     := expr ("," expr)*

``z`` is ``chi_1``; scalars broadcast against matrix symbols as multiples of
the identity.  Division ``x / y`` is ``x * inv(y)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import DimensionMismatch, EvalError, NoConvergence, ParseError, SingularSymbol
from .symbol import (
    FourierSymbol,
    GridSamples,
    constant,
    default_grid,
    invert,
    monomial,
    multiply,
    power,
    sample,
    symbol_from_coefficients,
)

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_]+)
  | (?P<op>[-+*/^(),;\[\]])
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(src: str) -> list[_Tok]:
    toks = []
    pos = 0
    raw = src.encode()
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m:
            raise ParseError(f"unexpected character {src[pos]!r}", len(src[:pos].encode()))
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(), len(src[:pos].encode())))
        pos = m.end()
    toks.append(_Tok("end", "", len(raw)))
    return toks


def _broadcast(x: FourierSymbol, y: FourierSymbol) -> tuple[FourierSymbol, FourierSymbol]:
    if x.N == y.N:
        return x, y
    if x.N == 1:
        return _promote(x, y.N), y
    if y.N == 1:
        return x, _promote(y, x.N)
    raise DimensionMismatch(f"cannot combine {x.N}x{x.N} and {y.N}x{y.N} symbols")


def _promote(x: FourierSymbol, N: int) -> FourierSymbol:
    stack = x.coeffs[:, 0, 0][:, None, None] * np.eye(N)
    return FourierSymbol(x.lo, stack, x.tail_bound)


def _exp(x: FourierSymbol, tol: float = 1e-13) -> FourierSymbol:
    M = default_grid(x.bandwidth)
    prev = None
    while M <= (1 << 16):
        vals = sample(x, M).values
        if x.N == 1:
            ev = np.exp(vals)
        else:
            ev = np.stack([expm(v) for v in vals])
        s = GridSamples(M, ev).to_symbol()
        if prev is not None and (s - prev).wiener_norm() <= tol * max(1.0, s.wiener_norm()):
            return s
        prev = s
        M *= 2
    raise NoConvergence("exp() coefficients did not settle")


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def eat(self, text: str | None = None, kind: str | None = None) -> _Tok:
        t = self.tok
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            want = text if text is not None else kind
            got = t.text or "end of input"
            raise ParseError(f"expected {want!r}, found {got!r}", t.pos)
        self.i += 1
        return t

    def parse(self) -> FourierSymbol:
        v = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.pos)
        return v

    def expr(self) -> FourierSymbol:
        v = self.term()
        while self.tok.text in ("+", "-"):
            op = self.eat().text
            w = self.term()
            v, w = _broadcast(v, w)
            v = v + w if op == "+" else v - w
        return v

    def term(self) -> FourierSymbol:
        v = self.unary()
        while self.tok.text in ("*", "/"):
            t = self.eat()
            w = self.unary()
            v, w = _broadcast(v, w)
            if t.text == "*":
                v = multiply(v, w)
            else:
                v = multiply(v, self._inv(w, t.pos))
        return v

    def unary(self) -> FourierSymbol:
        if self.tok.text in ("+", "-"):
            op = self.eat().text
            v = self.unary()
            return -v if op == "-" else v
        return self.power()

    def power(self) -> FourierSymbol:
        v = self.primary()
        if self.tok.text == "^":
            t = self.eat()
            sign = 1
            if self.tok.text in ("+", "-"):
                sign = -1 if self.eat().text == "-" else 1
            num = self.eat(kind="num")
            if not num.text.isdigit():
                raise ParseError("exponent must be an integer", num.pos)
            n = sign * int(num.text)
            if n < 0:
                v = self._inv(v, t.pos)
                n = -n
            v = power(v, n)
        return v

    def primary(self) -> FourierSymbol:
        t = self.tok
        if t.kind == "num":
            self.eat()
            return constant(float(t.text))
        if t.kind == "name":
            self.eat()
            if t.text == "z":
                return monomial(1)
            if t.text == "i":
                return constant(1j)
            if t.text in ("exp", "inv"):
                self.eat("(")
                arg = self.expr()
                self.eat(")")
                return _exp(arg) if t.text == "exp" else self._inv(arg, t.pos)
            raise ParseError(f"unknown name {t.text!r}", t.pos)
        if t.text == "(":
            self.eat()
            v = self.expr()
            self.eat(")")
            return v
        if t.text == "[":
            return self.matrix()
        raise ParseError(f"unexpected {t.text or 'end of input'!r}", t.pos)

    def _row(self) -> list[FourierSymbol]:
        row = [self.expr()]
        while self.tok.text == ",":
            self.eat()
            row.append(self.expr())
        return row

    def matrix(self) -> FourierSymbol:
        start = self.eat("[")
        rows = []
        if self.tok.text == "[":
            while True:
                self.eat("[")
                rows.append(self._row())
                self.eat("]")
                if self.tok.text != ",":
                    break
                self.eat()
        else:
            rows.append(self._row())
            while self.tok.text == ";":
                self.eat()
                rows.append(self._row())
        self.eat("]")
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ParseError("matrix must be square", start.pos)
        if any(e.N != 1 for r in rows for e in r):
            raise ParseError("matrix entries must be scalar expressions", start.pos)
        pairs: dict[int, np.ndarray] = {}
        tail = 0.0
        for i, r in enumerate(rows):
            for j, e in enumerate(r):
                tail += e.tail_bound
                for k, blk in e.items():
                    pairs.setdefault(k, np.zeros((n, n), dtype=complex))[i, j] = blk[0, 0]
        return symbol_from_coefficients(pairs, n, tail)

    @staticmethod
    def _inv(v: FourierSymbol, pos: int) -> FourierSymbol:
        try:
            return invert(v)
        except SingularSymbol as exc:
            raise EvalError(f"inverse of a symbol vanishing on the grid (at byte {pos}): {exc}") from exc


def parse_symbol(expr: str) -> FourierSymbol:
    """Parse and evaluate a symbol expression such as ``"(1+0.5*z)*(1+0.5/z)"``."""
    return _Parser(expr).parse()
