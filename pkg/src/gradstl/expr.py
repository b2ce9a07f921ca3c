"""Differentiable real-valued functions of a single sample vector.

An :class:`Expr` is an immutable tree.  It can be evaluated on one sample
(:func:`eval_expr`, :func:`d_expr`) or on every row of a signal matrix at once
(:func:`eval_columns`, :func:`grad_columns`); both paths perform the same
floating-point operations in the same order, so they agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from ._lexer import TokenStream, format_number
from .errors import DomainError, FormulaSyntaxError, UnboundVariable, UnknownVariable


@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class Var:
    index: int
    name: str | None = None


@dataclass(frozen=True)
class Add:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Neg:
    arg: Expr


@dataclass(frozen=True)
class PowInt:
    base: Expr
    exponent: int

    def __post_init__(self):
        if not isinstance(self.exponent, int) or self.exponent < 0:
            raise ValueError(f"exponent must be a nonnegative integer, got {self.exponent!r}")


@dataclass(frozen=True)
class Sqrt:
    arg: Expr


Expr = Union[Constant, Var, Add, Sub, Mul, Div, Neg, PowInt, Sqrt]

_BINARY = (Add, Sub, Mul, Div)


def mentions(e: Expr, var: int) -> bool:
    """True when variable index ``var`` occurs anywhere in ``e``."""
    if isinstance(e, Var):
        return e.index == var
    if isinstance(e, Constant):
        return False
    if isinstance(e, _BINARY):
        return mentions(e.left, var) or mentions(e.right, var)
    if isinstance(e, PowInt):
        return mentions(e.base, var)
    return mentions(e.arg, var)


def variables(e: Expr) -> set[int]:
    if isinstance(e, Var):
        return {e.index}
    if isinstance(e, Constant):
        return set()
    if isinstance(e, _BINARY):
        return variables(e.left) | variables(e.right)
    if isinstance(e, PowInt):
        return variables(e.base)
    return variables(e.arg)


def _power(base, exponent):
    # repeated multiplication keeps scalar and column paths identical
    result = 1.0
    for _ in range(exponent):
        result = result * base
    return result


def _lookup(sample, index):
    if index < 0 or index >= len(sample):
        raise UnboundVariable(f"variable index {index} out of range for sample of width {len(sample)}")
    return float(sample[index])


def eval_expr(e: Expr, sample) -> float:
    """Evaluate ``e`` at one sample vector.

    Raises DomainError on division by zero or the square root of a negative
    number, and UnboundVariable for an index beyond the sample width.
    """
    if isinstance(e, Constant):
        return float(e.value)
    if isinstance(e, Var):
        return _lookup(sample, e.index)
    if isinstance(e, Add):
        return eval_expr(e.left, sample) + eval_expr(e.right, sample)
    if isinstance(e, Sub):
        return eval_expr(e.left, sample) - eval_expr(e.right, sample)
    if isinstance(e, Mul):
        return eval_expr(e.left, sample) * eval_expr(e.right, sample)
    if isinstance(e, Div):
        num = eval_expr(e.left, sample)
        den = eval_expr(e.right, sample)
        if den == 0.0:
            raise DomainError("division by zero")
        return num / den
    if isinstance(e, Neg):
        return -eval_expr(e.arg, sample)
    if isinstance(e, PowInt):
        return _power(eval_expr(e.base, sample), e.exponent)
    if isinstance(e, Sqrt):
        u = eval_expr(e.arg, sample)
        if u < 0.0:
            raise DomainError("square root of a negative number")
        return math.sqrt(u)
    raise TypeError(f"not an expression: {e!r}")


def _dual(e: Expr, sample, var: int) -> tuple[float, float]:
    if not mentions(e, var):
        # exact zero, even where an overflowed value would turn 0 * inf into nan
        return eval_expr(e, sample), 0.0
    if isinstance(e, Constant):
        return float(e.value), 0.0
    if isinstance(e, Var):
        return _lookup(sample, e.index), (1.0 if e.index == var else 0.0)
    if isinstance(e, Neg):
        u, du = _dual(e.arg, sample, var)
        return -u, -du
    if isinstance(e, PowInt):
        u, du = _dual(e.base, sample, var)
        n = e.exponent
        if n == 0:
            return 1.0, 0.0
        return _power(u, n), n * _power(u, n - 1) * du
    if isinstance(e, Sqrt):
        u, du = _dual(e.arg, sample, var)
        if u < 0.0:
            raise DomainError("square root of a negative number")
        r = math.sqrt(u)
        if r == 0.0:
            if mentions(e.arg, var):
                raise DomainError("sqrt is not differentiable at 0")
            return r, 0.0
        return r, du / (2.0 * r)
    a, da = _dual(e.left, sample, var)
    b, db = _dual(e.right, sample, var)
    if isinstance(e, Add):
        return a + b, da + db
    if isinstance(e, Sub):
        return a - b, da - db
    if isinstance(e, Mul):
        return a * b, da * b + a * db
    if isinstance(e, Div):
        if b == 0.0:
            raise DomainError("division by zero")
        return a / b, (da * b - a * db) / b / b
    raise TypeError(f"not an expression: {e!r}")


def d_expr(e: Expr, sample, var: int) -> float:
    """Exact partial derivative of ``e`` with respect to variable ``var`` at ``sample``."""
    return _dual(e, sample, var)[1]


# -- column (whole-signal) evaluation ---------------------------------------


def _column(values, index):
    if index < 0 or index >= values.shape[1]:
        raise UnboundVariable(f"variable index {index} out of range for signal of width {values.shape[1]}")
    return values[:, index]


def _dual_columns(e, values, var):
    n = values.shape[0]
    if var >= 0 and not mentions(e, var):
        return _dual_columns(e, values, -1)[0], np.zeros(n)
    if isinstance(e, Constant):
        return np.full(n, float(e.value)), np.zeros(n)
    if isinstance(e, Var):
        col = _column(values, e.index).astype(float)
        return col, np.full(n, 1.0 if e.index == var else 0.0)
    if isinstance(e, Neg):
        u, du = _dual_columns(e.arg, values, var)
        return -u, -du
    if isinstance(e, PowInt):
        u, du = _dual_columns(e.base, values, var)
        k = e.exponent
        if k == 0:
            return np.ones(n), np.zeros(n)
        return _power(u, k), k * _power(u, k - 1) * du
    if isinstance(e, Sqrt):
        u, du = _dual_columns(e.arg, values, var)
        if np.any(u < 0.0):
            raise DomainError("square root of a negative number")
        r = np.sqrt(u)
        if var >= 0 and np.any(r == 0.0) and mentions(e.arg, var):
            raise DomainError("sqrt is not differentiable at 0")
        with np.errstate(divide="ignore", invalid="ignore"):
            d = np.where(r == 0.0, 0.0, du / (2.0 * r))
        return r, d
    a, da = _dual_columns(e.left, values, var)
    b, db = _dual_columns(e.right, values, var)
    if isinstance(e, Add):
        return a + b, da + db
    if isinstance(e, Sub):
        return a - b, da - db
    if isinstance(e, Mul):
        return a * b, da * b + a * db
    if isinstance(e, Div):
        if np.any(b == 0.0):
            raise DomainError("division by zero")
        return a / b, (da * b - a * db) / b / b
    raise TypeError(f"not an expression: {e!r}")


def eval_columns(e: Expr, values: np.ndarray) -> np.ndarray:
    """Evaluate ``e`` on every row of an n-by-m matrix; returns shape (n,)."""
    return _dual_columns(e, np.asarray(values, dtype=float), -1)[0]


def grad_columns(e: Expr, values: np.ndarray) -> np.ndarray:
    """Partial derivatives of ``e`` on every row; returns shape (n, m)."""
    values = np.asarray(values, dtype=float)
    out = np.zeros(values.shape)
    for var in variables(e):
        _column(values, var)
        out[:, var] = _dual_columns(e, values, var)[1]
    return out


# -- concrete syntax ---------------------------------------------------------


def parse_expr(text: str, names) -> Expr:
    """Parse expression text; identifiers resolve against ``names``."""
    ts = TokenStream(text)
    e = parse_expr_tokens(ts, list(names))
    ts.expect_end()
    return e


def parse_expr_tokens(ts: TokenStream, names: list[str]) -> Expr:
    left = _parse_term(ts, names)
    while True:
        if ts.accept("+"):
            left = Add(left, _parse_term(ts, names))
        elif ts.accept("-"):
            left = Sub(left, _parse_term(ts, names))
        else:
            return left


def _parse_term(ts, names):
    left = _parse_unary(ts, names)
    while True:
        if ts.accept("*"):
            left = Mul(left, _parse_unary(ts, names))
        elif ts.accept("/"):
            left = Div(left, _parse_unary(ts, names))
        else:
            return left


def _parse_unary(ts, names):
    if ts.accept("-"):
        # "-<literal>" is a negative constant, anything else is negation
        if ts.peek.kind == "number" and ts.peek_at(1).text != "^":
            return Constant(-float(ts.next().text))
        return Neg(_parse_unary(ts, names))
    return _parse_power(ts, names)


def _parse_power(ts, names):
    base = _parse_atom(ts, names)
    while ts.accept("^"):
        tok = ts.next()
        if tok.kind != "number" or not tok.text.isdigit():
            raise FormulaSyntaxError("exponent must be a nonnegative integer literal", tok.pos)
        base = PowInt(base, int(tok.text))
    return base


def _parse_atom(ts, names):
    tok = ts.peek
    if tok.kind == "number":
        ts.next()
        return Constant(float(tok.text))
    if tok.kind == "ident":
        ts.next()
        if tok.text == "sqrt" and ts.peek.text == "(" and "sqrt" not in names:
            ts.expect("(")
            arg = parse_expr_tokens(ts, names)
            ts.expect(")")
            return Sqrt(arg)
        if tok.text not in names:
            raise UnknownVariable(f"unknown variable {tok.text!r}", tok.pos)
        return Var(names.index(tok.text), tok.text)
    if ts.accept("("):
        e = parse_expr_tokens(ts, names)
        ts.expect(")")
        return e
    raise FormulaSyntaxError(f"expected an expression, found {tok.text or 'end of input'!r}", tok.pos)


def print_expr(e: Expr) -> str:
    """Render ``e`` so that :func:`parse_expr` rebuilds the same tree."""
    if isinstance(e, Constant):
        return format_number(e.value)
    if isinstance(e, Var):
        return e.name if e.name is not None else f"v{e.index}"
    if isinstance(e, Neg):
        inner = print_expr(e.arg)
        if isinstance(e.arg, Constant):
            inner = f"({inner})"
        return f"(-{inner})"
    if isinstance(e, PowInt):
        return f"({print_expr(e.base)})^{e.exponent}"
    if isinstance(e, Sqrt):
        return f"sqrt({print_expr(e.arg)})"
    op = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(e)]
    return f"({print_expr(e.left)} {op} {print_expr(e.right)})"
