"""Fast smooth robustness and gradients through the tabulated kernel.

Results match :func:`gradstl.robustness.rstar` and
:func:`gradstl.robustness.gradient` to rounding; the kernel visits every
(node, sample) pair once, which keeps deeply nested formulas on long signals
tractable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NonPositiveGamma
from .expr import eval_columns, grad_columns
from .formula import Always, And, Atom, Eventually, Not, Until, subformulas
from .semantics import check_index
from .signal import Signal

USING_NUMBA = _kernels.HAVE_NUMBA

_OPCODES = {
    Atom: _kernels.ATOM,
    Not: _kernels.NOT,
    And: _kernels.AND,
    Always: _kernels.ALWAYS,
    Eventually: _kernels.EVENTUALLY,
    Until: _kernels.UNTIL,
}


@dataclass(frozen=True, eq=False)
class Program:
    """A formula flattened into parallel node arrays (post-order)."""

    ops: np.ndarray
    left: np.ndarray
    right: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    atom_row: np.ndarray
    atoms: tuple

    @property
    def root(self) -> int:
        return self.ops.shape[0] - 1


def compile_formula(phi) -> Program:
    nodes = list(subformulas(phi))
    ids = {}
    ops, left, right, lo, hi, atom_row, atoms = [], [], [], [], [], [], []
    for j, node in enumerate(nodes):
        ids[id(node)] = j
        ops.append(_OPCODES[type(node)])
        a = b = -1
        if isinstance(node, (Not, Always, Eventually)):
            a = ids[id(node.arg)]
        elif isinstance(node, (And, Until)):
            a, b = ids[id(node.left)], ids[id(node.right)]
        left.append(a)
        right.append(b)
        w = getattr(node, "window", None)
        lo.append(w.lo if w is not None else 0.0)
        hi.append(w.hi if w is not None else 0.0)
        if isinstance(node, Atom):
            atom_row.append(len(atoms))
            atoms.append(node)
        else:
            atom_row.append(-1)
    return Program(
        np.array(ops, dtype=np.int64),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(lo, dtype=float),
        np.array(hi, dtype=float),
        np.array(atom_row, dtype=np.int64),
        tuple(atoms),
    )


def _as_program(phi):
    return phi if isinstance(phi, Program) else compile_formula(phi)


def _atom_tables(prog: Program, values: np.ndarray, with_grad: bool):
    n, m = values.shape
    vals = np.zeros((len(prog.atoms), n))
    grads = np.zeros((len(prog.atoms), n, m if with_grad else 0))
    for r, atom in enumerate(prog.atoms):
        vals[r] = eval_columns(atom.f, values) - atom.c
        if with_grad:
            grads[r] = grad_columns(atom.f, values)
    return vals, grads


def table(gamma: float, s: Signal, phi, with_grad: bool = False):
    """Full value table ``V[node, n]`` and, optionally, derivative table ``D``."""
    prog = _as_program(phi)
    vals, grads = _atom_tables(prog, s.values, with_grad)
    return _kernels.robustness_table(
        prog.ops, prog.left, prog.right, prog.lo, prog.hi, prog.atom_row,
        vals, grads, s.times, float(gamma), with_grad,
    )


def rstar(gamma: float, s: Signal, phi, n: int = 0) -> float:
    check_index(s, n)
    prog = _as_program(phi)
    V, _ = table(gamma, s, prog)
    return float(V[prog.root, n])


def rstar_and_gradient(gamma: float, s: Signal, phi, n: int = 0) -> tuple[float, np.ndarray]:
    if not gamma > 0.0:
        raise NonPositiveGamma(f"derivatives need gamma > 0, got {gamma}")
    check_index(s, n)
    prog = _as_program(phi)
    V, D = table(gamma, s, prog, with_grad=True)
    return float(V[prog.root, n]), np.array(D[prog.root, n])
