"""Smooth robustness and its exact derivative.

``gamma`` is the smoothing parameter throughout: ``gamma <= 0`` selects the
exact min/max, ``gamma > 0`` the log-sum-exp forms.  :func:`rstar` mirrors the
recursion of :func:`gradstl.semantics.eval_estar` with disjunction replaced by
``smooth_max``, conjunction by ``smooth_min`` and the window tests ``x <= 0`` /
``x > 0`` by the quantities ``-x`` / ``x``.

These functions are the reference implementation.  They recurse exactly as
written and recompute shared sub-terms; :mod:`gradstl.engine` computes the same
values through a tabulated kernel and is what the optimizer uses.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NonPositiveGamma
from .expr import d_expr, eval_expr, variables
from .formula import Always, And, Atom, Eventually, Not, Until, shift
from .semantics import TemporalStep, check_index, is_base_case
from .signal import Signal, delta_t

LN2 = math.log(2.0)


def smooth_max(gamma: float, a: float, b: float) -> float:
    if gamma <= 0.0:
        return a if a >= b else b
    m = a if a >= b else b
    return m + gamma * math.log1p(math.exp(-abs(a - b) / gamma))


def smooth_min(gamma: float, a: float, b: float) -> float:
    if gamma <= 0.0:
        return a if a <= b else b
    return -smooth_max(gamma, -a, -b)


def max_weights(gamma: float, a: float, b: float) -> tuple[float, float]:
    """Sensitivities (d/da, d/db) of ``smooth_max(gamma, a, b)``.

    For gamma > 0 these are the two softmax weights, computed from the
    non-positive exponent so they never overflow.  The hard max splits a tie
    evenly.
    """
    if gamma <= 0.0:
        if a > b:
            return 1.0, 0.0
        if b > a:
            return 0.0, 1.0
        return 0.5, 0.5
    if a >= b:
        e = math.exp((b - a) / gamma)
        return 1.0 / (1.0 + e), e / (1.0 + e)
    e = math.exp((a - b) / gamma)
    return e / (1.0 + e), 1.0 / (1.0 + e)


def min_weights(gamma: float, a: float, b: float) -> tuple[float, float]:
    return max_weights(gamma, -a, -b)


def d_smooth_max(gamma: float, a: float, da: float, b: float, db: float) -> float:
    wa, wb = max_weights(gamma, a, b)
    return da * wa + db * wb


def d_smooth_min(gamma: float, a: float, da: float, b: float, db: float) -> float:
    wa, wb = min_weights(gamma, a, b)
    return da * wa + db * wb


# -- R* ----------------------------------------------------------------------


def rstar(gamma: float, s: Signal, phi, n: int = 0, trace: list | None = None) -> float:
    """Smooth robustness of ``phi`` on ``s`` evaluated from sample ``n``.

    When ``trace`` is a list, every temporal visit is appended to it as a
    :class:`~gradstl.semantics.TemporalStep`.
    """
    check_index(s, n)
    return _rstar(float(gamma), s, phi, n, trace)


def _rstar(g, s, phi, n, trace):
    if isinstance(phi, Atom):
        return eval_expr(phi.f, s.values[n]) - phi.c
    if isinstance(phi, Not):
        return -_rstar(g, s, phi.arg, n, trace)
    if isinstance(phi, And):
        return smooth_min(g, _rstar(g, s, phi.left, n, trace), _rstar(g, s, phi.right, n, trace))

    x = phi.window.lo
    base = is_base_case(s, n, phi.window.hi)
    if trace is not None:
        trace.append(TemporalStep(_op_name(phi), n, x, phi.window.hi, base))

    if isinstance(phi, Until):
        both = _rstar(g, s, And(phi.left, phi.right), n, trace)
        if base:
            return smooth_min(g, -x, both)
        r1 = _rstar(g, s, phi.left, n, trace)
        nxt = _rstar(g, s, shift(phi, delta_t(s, n)), n + 1, trace)
        return smooth_max(g, smooth_min(g, smooth_max(g, x, r1), nxt), smooth_min(g, -x, both))

    r = _rstar(g, s, phi.arg, n, trace)
    if base:
        return smooth_min(g, -x, r)
    nxt = _rstar(g, s, shift(phi, delta_t(s, n)), n + 1, trace)
    if isinstance(phi, Always):
        return smooth_min(g, smooth_max(g, x, r), nxt)
    if isinstance(phi, Eventually):
        return smooth_max(g, smooth_min(g, -x, r), nxt)
    raise TypeError(f"not a formula: {phi!r}")


def _op_name(phi):
    return {Always: "G", Eventually: "F", Until: "U"}[type(phi)]


def smoothing_depth(s: Signal, phi, n: int = 0) -> int:
    """Longest chain of nested min/max operations in the evaluation of ``rstar``.

    Every smooth operation is 1-Lipschitz and within ``gamma*ln 2`` of its
    exact counterpart, so ``|rstar(gamma) - rstar(0)| <= depth * gamma * ln 2``.
    """
    check_index(s, n)
    return _sdepth(s, phi, n)


def _sdepth(s, phi, n):
    if isinstance(phi, Atom):
        return 0
    if isinstance(phi, Not):
        return _sdepth(s, phi.arg, n)
    if isinstance(phi, And):
        return 1 + max(_sdepth(s, phi.left, n), _sdepth(s, phi.right, n))
    base = is_base_case(s, n, phi.window.hi)
    if isinstance(phi, Until):
        both = 1 + max(_sdepth(s, phi.left, n), _sdepth(s, phi.right, n))
        if base:
            return 1 + both
        nxt = _sdepth(s, shift(phi, delta_t(s, n)), n + 1)
        return 1 + max(1 + max(1 + _sdepth(s, phi.left, n), nxt), 1 + both)
    inner = _sdepth(s, phi.arg, n)
    if base:
        return 1 + inner
    nxt = _sdepth(s, shift(phi, delta_t(s, n)), n + 1)
    return 1 + max(1 + inner, nxt)


# -- dR* ---------------------------------------------------------------------


def _check_gamma(gamma):
    if not gamma > 0.0:
        raise NonPositiveGamma(f"derivatives need gamma > 0, got {gamma}")


def drstar(gamma: float, s: Signal, phi, n: int, var: int, k: int) -> float:
    """Derivative of ``rstar(gamma, s, phi, n)`` with respect to ``values[k, var]``."""
    _check_gamma(gamma)
    check_index(s, n)
    check_index(s, k)
    if var < 0 or var >= s.width:
        raise IndexError(f"variable index {var} outside a {s.width}-variable signal")
    return _drstar(float(gamma), s, phi, n, _ScalarTangent(var, k))[1]


def rstar_and_gradient(gamma: float, s: Signal, phi, n: int = 0) -> tuple[float, np.ndarray]:
    """One recursion carrying the full n-by-m derivative matrix."""
    _check_gamma(gamma)
    check_index(s, n)
    return _drstar(float(gamma), s, phi, n, _MatrixTangent(s))


def gradient(gamma: float, s: Signal, phi, n: int = 0, mode: str = "batched") -> np.ndarray:
    """Matrix of d rstar / d values[k, i], laid out like ``s.values``.

    ``mode="batched"`` runs a single recursion with matrix-valued derivatives;
    ``mode="per_variable"`` calls :func:`drstar` once per entry.
    """
    if mode == "batched":
        return rstar_and_gradient(gamma, s, phi, n)[1]
    if mode == "per_variable":
        out = np.zeros(s.values.shape)
        for k in range(len(s)):
            for i in range(s.width):
                out[k, i] = drstar(gamma, s, phi, n, i, k)
        return out
    raise ValueError(f"unknown gradient mode {mode!r}")


class _ScalarTangent:
    def __init__(self, var, k):
        self.var = var
        self.k = k
        self.zero = 0.0

    def atom(self, f, sample, n):
        return d_expr(f, sample, self.var) if n == self.k else 0.0


class _MatrixTangent:
    def __init__(self, s):
        self.shape = s.values.shape
        self.zero = np.zeros(self.shape)

    def atom(self, f, sample, n):
        d = np.zeros(self.shape)
        for var in variables(f):
            d[n, var] = d_expr(f, sample, var)
        return d


def _smin(g, a, da, b, db):
    wa, wb = min_weights(g, a, b)
    return smooth_min(g, a, b), da * wa + db * wb


def _smax(g, a, da, b, db):
    wa, wb = max_weights(g, a, b)
    return smooth_max(g, a, b), da * wa + db * wb


def _drstar(g, s, phi, n, tan):
    if isinstance(phi, Atom):
        sample = s.values[n]
        return eval_expr(phi.f, sample) - phi.c, tan.atom(phi.f, sample, n)
    if isinstance(phi, Not):
        r, d = _drstar(g, s, phi.arg, n, tan)
        return -r, -d
    if isinstance(phi, And):
        return _smin(g, *_drstar(g, s, phi.left, n, tan), *_drstar(g, s, phi.right, n, tan))

    x = phi.window.lo
    zero = tan.zero
    base = is_base_case(s, n, phi.window.hi)

    if isinstance(phi, Until):
        both = _drstar(g, s, And(phi.left, phi.right), n, tan)
        if base:
            return _smin(g, -x, zero, *both)
        r1 = _drstar(g, s, phi.left, n, tan)
        nxt = _drstar(g, s, shift(phi, delta_t(s, n)), n + 1, tan)
        stay = _smin(g, *_smax(g, x, zero, *r1), *nxt)
        return _smax(g, *stay, *_smin(g, -x, zero, *both))

    r = _drstar(g, s, phi.arg, n, tan)
    if base:
        return _smin(g, -x, zero, *r)
    nxt = _drstar(g, s, shift(phi, delta_t(s, n)), n + 1, tan)
    if isinstance(phi, Always):
        return _smin(g, *_smax(g, x, zero, *r), *nxt)
    if isinstance(phi, Eventually):
        return _smax(g, *_smin(g, -x, zero, *r), *nxt)
    raise TypeError(f"not a formula: {phi!r}")
