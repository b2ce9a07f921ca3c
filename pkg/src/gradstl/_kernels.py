"""Tabulated smooth-robustness kernel.

``robustness_table`` fills ``V[j, n] = R*(node j, n)`` for every node of a
compiled formula (children before parents) and every start sample ``n``, and
optionally the derivative of each entry with respect to the whole signal,
``D[j, n] ~ (samples, variables)``.  A temporal node at ``n`` walks forward
while shrinking its window exactly as the recursive evaluator does, then folds
the min/max chain back from the stopping sample, reading children from the
table instead of recursing into them.

The same Python source runs either compiled by numba or as plain
Python/numpy.  Set ``GRADSTL_NO_NUMBA=1`` to force the numpy path.
"""

import math
import os

import numpy as np

ATOM, NOT, AND, ALWAYS, EVENTUALLY, UNTIL = range(6)

_DISABLED = os.environ.get("GRADSTL_NO_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("numba disabled by GRADSTL_NO_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised with the env flag
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn


def _smax(g, a, b):
    if g <= 0.0:
        wa = 1.0 if a > b else (0.0 if b > a else 0.5)
        return (a if a >= b else b), wa, 1.0 - wa
    if a >= b:
        e = math.exp((b - a) / g)
        return a + g * math.log1p(e), 1.0 / (1.0 + e), e / (1.0 + e)
    e = math.exp((a - b) / g)
    return b + g * math.log1p(e), e / (1.0 + e), 1.0 / (1.0 + e)


def _smin(g, a, b):
    if g <= 0.0:
        wa = 1.0 if a < b else (0.0 if b < a else 0.5)
        return (a if a <= b else b), wa, 1.0 - wa
    v, wa, wb = _smax(g, -a, -b)
    return -v, wa, wb


def _table(ops, left, right, lo, hi, atom_row, atom_val, atom_grad, times, gamma, with_grad):
    nnodes = ops.shape[0]
    S = times.shape[0]
    m = atom_grad.shape[2]
    V = np.zeros((nnodes, S))
    if with_grad:
        D = np.zeros((nnodes, S, S, m))
    else:
        D = np.zeros((nnodes, 1, 1, 1))
    xs = np.zeros(S)
    if with_grad:
        dacc = np.zeros((S, m))
    else:
        dacc = np.zeros((1, 1))

    for j in range(nnodes):
        op = ops[j]
        a = left[j]
        b = right[j]
        if op == ATOM:
            for n in range(S):
                V[j, n] = atom_val[atom_row[j], n]
                if with_grad:
                    D[j, n, n, :] = atom_grad[atom_row[j], n, :]
        elif op == NOT:
            for n in range(S):
                V[j, n] = -V[a, n]
                if with_grad:
                    D[j, n] = -D[a, n]
        elif op == AND:
            for n in range(S):
                v, wa, wb = _smin(gamma, V[a, n], V[b, n])
                V[j, n] = v
                if with_grad:
                    D[j, n] = D[a, n] * wa + D[b, n] * wb
        else:
            for n0 in range(S):
                # forward walk: record the window's lower bound at each sample
                x = lo[j]
                y = hi[j]
                n = n0
                cnt = 0
                while True:
                    xs[cnt] = x
                    cnt += 1
                    if n == S - 1:
                        break
                    dt = times[n + 1] - times[n]
                    if y - dt < 0.0:
                        break
                    x = x - dt
                    y = y - dt
                    n += 1

                # base clause at the stopping sample
                x = xs[cnt - 1]
                if op == UNTIL:
                    bv, bwa, bwb = _smin(gamma, V[a, n], V[b, n])
                    acc, wa, wb = _smin(gamma, -x, bv)
                    if with_grad:
                        dacc = 0.0 * wa + (D[a, n] * bwa + D[b, n] * bwb) * wb
                else:
                    acc, wa, wb = _smin(gamma, -x, V[a, n])
                    if with_grad:
                        dacc = 0.0 * wa + D[a, n] * wb

                # recursive clauses, innermost first
                for p in range(cnt - 2, -1, -1):
                    n = n0 + p
                    x = xs[p]
                    if op == ALWAYS:
                        iv, iwa, iwb = _smax(gamma, x, V[a, n])
                        acc, wa, wb = _smin(gamma, iv, acc)
                        if with_grad:
                            dacc = (0.0 * iwa + D[a, n] * iwb) * wa + dacc * wb
                    elif op == EVENTUALLY:
                        iv, iwa, iwb = _smin(gamma, -x, V[a, n])
                        acc, wa, wb = _smax(gamma, iv, acc)
                        if with_grad:
                            dacc = (0.0 * iwa + D[a, n] * iwb) * wa + dacc * wb
                    else:
                        bv, bwa, bwb = _smin(gamma, V[a, n], V[b, n])
                        kv, kwa, kwb = _smax(gamma, x, V[a, n])
                        sv, swa, swb = _smin(gamma, kv, acc)
                        hv, hwa, hwb = _smin(gamma, -x, bv)
                        acc, wa, wb = _smax(gamma, sv, hv)
                        if with_grad:
                            dstay = (0.0 * kwa + D[a, n] * kwb) * swa + dacc * swb
                            dhere = 0.0 * hwa + (D[a, n] * bwa + D[b, n] * bwb) * hwb
                            dacc = dstay * wa + dhere * wb
                V[j, n0] = acc
                if with_grad:
                    D[j, n0] = dacc
    return V, D


if HAVE_NUMBA:
    _smax = njit(cache=True)(_smax)
    _smin = njit(cache=True)(_smin)
    robustness_table = njit(cache=True)(_table)
else:
    robustness_table = _table
