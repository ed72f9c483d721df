"""Sheaf expressions and the bundle mini-language.

Grammar (whitespace-insensitive)::

    expr  := O | O(int) | sum(expr, int) | sum(expr, expr, ...)
           | dual(expr) | twist(expr, int) | syz(expr, int)
           | tensor(expr, expr) | opaque(name)

``sum(e, k)`` is ``e`` with multiplicity ``k``; ``opaque(name)`` refers to a
bundle declared in an input file. ``str(parse(s))`` is a normal form that
parses back to the same tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import ParseError


@dataclass(frozen=True)
class LineBundle:
    """``O(d)``: the ``d``-th power of the polarizing line bundle."""

    degree: int = 0

    def __str__(self) -> str:
        return f"O({self.degree})"


@dataclass(frozen=True)
class DirectSum:
    terms: tuple[tuple["Expr", int], ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("empty direct sum")
        if any(m < 1 for _, m in self.terms):
            raise ValueError("multiplicities must be positive")

    def __str__(self) -> str:
        if len(self.terms) == 1:
            e, m = self.terms[0]
            return f"sum({e},{m})"
        parts = [str(e) if m == 1 else f"sum({e},{m})" for e, m in self.terms]
        return f"sum({','.join(parts)})"


@dataclass(frozen=True)
class Dual:
    inner: "Expr"

    def __str__(self) -> str:
        return f"dual({self.inner})"


@dataclass(frozen=True)
class Twist:
    inner: "Expr"
    n: int

    def __str__(self) -> str:
        return f"twist({self.inner},{self.n})"


@dataclass(frozen=True)
class SyzygyOf:
    """Kernel of a general evaluation map ``W (x) O_X -> F`` with ``dim W = w``."""

    inner: "Expr"
    w: int

    def __str__(self) -> str:
        return f"syz({self.inner},{self.w})"


@dataclass(frozen=True)
class Tensor:
    left: "Expr"
    right: "Expr"

    def __str__(self) -> str:
        return f"tensor({self.left},{self.right})"


@dataclass(frozen=True)
class Opaque:
    """A bundle known only through user-supplied data, looked up by name."""

    name: str

    def __str__(self) -> str:
        return f"opaque({self.name})"


Expr = Union[LineBundle, DirectSum, Dual, Twist, SyzygyOf, Tensor, Opaque]

_TOKEN = re.compile(r"\s*(?:(?P<int>[+-]?\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_.\-]*)|(?P<punct>[(),]))")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
                raise ParseError(f"unexpected character {text[start]!r}", text, start)
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.i = 0

    def _peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", "", len(self.text))

    def _take(self, kind: str, value: str | None = None):
        tok = self._peek()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            got = tok[1] if tok[0] != "end" else "end of input"
            raise ParseError(f"expected {want!r}, found {got!r}", self.text, tok[2])
        self.i += 1
        return tok

    def _int(self) -> int:
        return int(self._take("int")[1])

    def parse(self) -> Expr:
        e = self.expr()
        tok = self._peek()
        if tok[0] != "end":
            raise ParseError(f"trailing input {tok[1]!r}", self.text, tok[2])
        return e

    def expr(self) -> Expr:
        kind, word, pos = self._peek()
        if kind != "name":
            got = word if kind != "end" else "end of input"
            raise ParseError(f"expected a bundle expression, found {got!r}", self.text, pos)
        self.i += 1
        if word == "O":
            if self._peek()[1] == "(":
                self._take("punct", "(")
                d = self._int()
                self._take("punct", ")")
                return LineBundle(d)
            return LineBundle(0)
        self._take("punct", "(")
        if word == "sum":
            first = self.expr()
            self._take("punct", ",")
            if self._peek()[0] == "int":
                pos = self._peek()[2]
                k = self._int()
                if k < 1:
                    raise ParseError("multiplicity must be positive", self.text, pos)
                self._take("punct", ")")
                return DirectSum(((first, k),))
            terms = [(first, 1), (self.expr(), 1)]
            while self._peek()[1] == ",":
                self._take("punct", ",")
                terms.append((self.expr(), 1))
            self._take("punct", ")")
            return DirectSum(tuple(terms))
        if word == "dual":
            inner = self.expr()
            self._take("punct", ")")
            return Dual(inner)
        if word in ("twist", "syz"):
            inner = self.expr()
            self._take("punct", ",")
            k = self._int()
            self._take("punct", ")")
            return Twist(inner, k) if word == "twist" else SyzygyOf(inner, k)
        if word == "tensor":
            left = self.expr()
            self._take("punct", ",")
            right = self.expr()
            self._take("punct", ")")
            return Tensor(left, right)
        if word == "opaque":
            name = self._take("name")[1]
            self._take("punct", ")")
            return Opaque(name)
        raise ParseError(f"unknown constructor {word!r}", self.text, pos)


def parse_expr(text: str) -> Expr:
    """Parse the bundle mini-language; errors carry the offending position."""
    if not isinstance(text, str) or not text.strip():
        raise ParseError("empty bundle expression", text or "", 0)
    return _Parser(text).parse()


def as_expr(e: Expr | str) -> Expr:
    return parse_expr(e) if isinstance(e, str) else e


def split_degrees(e: Expr) -> tuple[int, ...] | None:
    """Degrees of line-bundle summands when ``e`` is visibly a sum of line bundles."""
    if isinstance(e, LineBundle):
        return (e.degree,)
    if isinstance(e, Dual):
        inner = split_degrees(e.inner)
        return None if inner is None else tuple(sorted(-d for d in inner))
    if isinstance(e, Twist):
        inner = split_degrees(e.inner)
        return None if inner is None else tuple(sorted(d + e.n for d in inner))
    if isinstance(e, DirectSum):
        out: list[int] = []
        for t, m in e.terms:
            inner = split_degrees(t)
            if inner is None:
                return None
            out.extend(inner * m)
        return tuple(sorted(out))
    if isinstance(e, Tensor):
        a, b = split_degrees(e.left), split_degrees(e.right)
        if a is None or b is None:
            return None
        return tuple(sorted(x + y for x in a for y in b))
    return None
