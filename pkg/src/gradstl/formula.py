"""STL formula syntax tree, parser and printer.

Concrete syntax::

    formula := or
    or      := and ('|' and)*
    and     := until ('&' until)*
    until   := unary ('U' window unary)*
    unary   := '!' unary | 'G' window unary | 'F' window unary | primary
    primary := '(' formula ')' | '{' expr '>' number '}'
    window  := '[' number ',' number ']'

``G`` is Always, ``F`` is Eventually, ``U`` is Until and ``a | b`` is sugar
for ``!(!a & !b)``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

from ._lexer import TokenStream, format_number
from .errors import FormulaSyntaxError, InvalidInterval
from .expr import Expr, parse_expr_tokens, print_expr


@dataclass(frozen=True)
class Window:
    """Relative time window ``[lo, hi]``, inclusive at both ends."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"window lower bound {self.lo} exceeds upper bound {self.hi}")

    def shifted(self, dt: float) -> Window:
        return Window(self.lo - dt, self.hi - dt)


@dataclass(frozen=True)
class Atom:
    """Holds when ``f(sample) > c``."""

    f: Expr
    c: float


@dataclass(frozen=True)
class Not:
    arg: Formula


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Always:
    window: Window
    arg: Formula


@dataclass(frozen=True)
class Eventually:
    window: Window
    arg: Formula


@dataclass(frozen=True)
class Until:
    window: Window
    left: Formula
    right: Formula


Formula = Union[Atom, Not, And, Always, Eventually, Until]
TEMPORAL = (Always, Eventually, Until)


def shift(phi, dt: float):
    """Move a temporal node's window by ``-dt``."""
    return replace(phi, window=phi.window.shifted(dt))


def derived_or(a: Formula, b: Formula) -> Formula:
    return Not(And(Not(a), Not(b)))


def conjunction(parts) -> Formula:
    """Left-nested conjunction of one or more formulas."""
    parts = list(parts)
    if not parts:
        raise ValueError("empty conjunction")
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def children(phi: Formula) -> tuple:
    if isinstance(phi, Atom):
        return ()
    if isinstance(phi, (Not, Always, Eventually)):
        return (phi.arg,)
    return (phi.left, phi.right)


def size(phi: Formula) -> int:
    """Number of sub-formulae (AST nodes)."""
    return 1 + sum(size(c) for c in children(phi))


def depth(phi: Formula) -> int:
    """Height of the AST; an atom has depth 1."""
    return 1 + max((depth(c) for c in children(phi)), default=0)


def temporal_depth(phi: Formula) -> int:
    """Longest chain of nested temporal operators."""
    inner = max((temporal_depth(c) for c in children(phi)), default=0)
    return inner + 1 if isinstance(phi, TEMPORAL) else inner


def temporal_count(phi: Formula) -> int:
    own = 1 if isinstance(phi, TEMPORAL) else 0
    return own + sum(temporal_count(c) for c in children(phi))


def conjuncts(phi: Formula) -> list:
    """Flatten a tree of top-level And nodes."""
    if isinstance(phi, And):
        return conjuncts(phi.left) + conjuncts(phi.right)
    return [phi]


def subformulas(phi: Formula):
    """Post-order traversal (children before parents)."""
    for c in children(phi):
        yield from subformulas(c)
    yield phi


# -- parsing -----------------------------------------------------------------


def parse_formula(text: str, names) -> Formula:
    ts = TokenStream(text)
    phi = _Parser(ts, list(names)).formula()
    ts.expect_end()
    return phi


class _Parser:
    def __init__(self, ts: TokenStream, names: list[str]):
        self.ts = ts
        self.names = names

    def formula(self):
        left = self.conj()
        while self.ts.accept("|"):
            left = derived_or(left, self.conj())
        return left

    def conj(self):
        left = self.until()
        while self.ts.accept("&"):
            left = And(left, self.until())
        return left

    def until(self):
        left = self.unary()
        while self._at_temporal("U"):
            self.ts.next()
            w = self.window()
            left = Until(w, left, self.unary())
        return left

    def unary(self):
        ts = self.ts
        if ts.accept("!"):
            return Not(self.unary())
        if self._at_temporal("G"):
            ts.next()
            w = self.window()
            return Always(w, self.unary())
        if self._at_temporal("F"):
            ts.next()
            w = self.window()
            return Eventually(w, self.unary())
        return self.primary()

    def primary(self):
        ts = self.ts
        if ts.accept("("):
            phi = self.formula()
            ts.expect(")")
            return phi
        if ts.accept("{"):
            f = parse_expr_tokens(ts, self.names)
            ts.expect(">")
            c = ts.signed_number()
            ts.expect("}")
            return Atom(f, c)
        tok = ts.peek
        raise FormulaSyntaxError(f"expected a formula, found {tok.text or 'end of input'!r}", tok.pos)

    def window(self):
        ts = self.ts
        start = ts.expect("[").pos
        lo = ts.signed_number()
        ts.expect(",")
        hi = ts.signed_number()
        ts.expect("]")
        if not (0.0 <= lo <= hi) or hi == float("inf"):
            raise InvalidInterval(f"interval [{lo}, {hi}] must satisfy 0 <= x <= y", start)
        return Window(lo, hi)

    def _at_temporal(self, letter):
        tok = self.ts.peek
        return tok.kind == "ident" and tok.text == letter and self.ts.peek_at(1).text == "["


def print_formula(phi: Formula) -> str:
    """Fully parenthesised text that :func:`parse_formula` maps back to ``phi``."""
    if isinstance(phi, Atom):
        return "{" + print_expr(phi.f) + " > " + format_number(phi.c) + "}"
    if isinstance(phi, Not):
        return "!(" + print_formula(phi.arg) + ")"
    if isinstance(phi, And):
        return "(" + print_formula(phi.left) + " & " + print_formula(phi.right) + ")"
    w = "[" + format_number(phi.window.lo) + ", " + format_number(phi.window.hi) + "]"
    if isinstance(phi, Always):
        return "G" + w + "(" + print_formula(phi.arg) + ")"
    if isinstance(phi, Eventually):
        return "F" + w + "(" + print_formula(phi.arg) + ")"
    return "(" + print_formula(phi.left) + " U" + w + " " + print_formula(phi.right) + ")"
