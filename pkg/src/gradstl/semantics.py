"""Boolean semantics: the recursive evaluator and brute-force oracles.

:func:`eval_estar` walks the signal one sample at a time, carrying each
temporal operator's window relative to the current sample and shrinking it by
the gap to the next sample (the adaptive temporal window).  :func:`eval_oracle`
and :func:`robustness_oracle` enumerate absolute windows directly and exist to
check it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EmptyWindow
from .expr import eval_expr
from .formula import Always, And, Atom, Eventually, Not, Until, shift
from .signal import Signal, delta_t


@dataclass(frozen=True)
class TemporalStep:
    """One visit of a temporal operator during recursive evaluation."""

    op: str
    n: int
    lo: float
    hi: float
    base: bool


@dataclass
class EvalStats:
    """Per-call instrumentation of :func:`eval_estar`.

    ``max_temporal_depth`` is one more than the largest number of temporal
    recursion steps (shifts to the next sample) on any call stack.
    """

    call_count: int = 0
    max_temporal_depth: int = 0
    steps: list[TemporalStep] = field(default_factory=list)


_OP_NAMES = {Always: "G", Eventually: "F", Until: "U"}


def check_index(s: Signal, n: int) -> None:
    if n < 0 or n >= len(s):
        raise IndexError(f"sample index {n} outside a {len(s)}-sample signal")


def is_base_case(s: Signal, n: int, hi: float) -> bool:
    """Temporal recursion stops at the last sample or when the window would pass it."""
    return n == len(s) - 1 or hi - delta_t(s, n) < 0.0


def eval_estar(s: Signal, phi, n: int = 0, stats: EvalStats | None = None) -> bool:
    check_index(s, n)
    if stats is None:
        stats = EvalStats()
    return _estar(s, phi, n, stats, 1)


def eval_estar_stats(s: Signal, phi, n: int = 0) -> tuple[bool, EvalStats]:
    stats = EvalStats()
    return eval_estar(s, phi, n, stats), stats


def _estar(s, phi, n, stats, tdepth):
    stats.call_count += 1
    if tdepth > stats.max_temporal_depth:
        stats.max_temporal_depth = tdepth
    if isinstance(phi, Atom):
        return eval_expr(phi.f, s.values[n]) > phi.c
    if isinstance(phi, Not):
        return not _estar(s, phi.arg, n, stats, tdepth)
    if isinstance(phi, And):
        return _estar(s, phi.left, n, stats, tdepth) and _estar(s, phi.right, n, stats, tdepth)

    lo, hi = phi.window.lo, phi.window.hi
    base = is_base_case(s, n, hi)
    stats.steps.append(TemporalStep(_OP_NAMES[type(phi)], n, lo, hi, base))

    if isinstance(phi, Eventually):
        here = lo <= 0.0 and _estar(s, phi.arg, n, stats, tdepth)
        if base:
            return here
        return here or _estar(s, shift(phi, delta_t(s, n)), n + 1, stats, tdepth + 1)

    if isinstance(phi, Always):
        if base:
            return lo <= 0.0 and _estar(s, phi.arg, n, stats, tdepth)
        return (lo > 0.0 or _estar(s, phi.arg, n, stats, tdepth)) and _estar(
            s, shift(phi, delta_t(s, n)), n + 1, stats, tdepth + 1
        )

    if isinstance(phi, Until):
        both = And(phi.left, phi.right)
        if base:
            return lo <= 0.0 and _estar(s, both, n, stats, tdepth)
        return (
            (lo > 0.0 or _estar(s, phi.left, n, stats, tdepth))
            and _estar(s, shift(phi, delta_t(s, n)), n + 1, stats, tdepth + 1)
        ) or (lo <= 0.0 and _estar(s, both, n, stats, tdepth))

    raise TypeError(f"not a formula: {phi!r}")


# -- oracles -----------------------------------------------------------------


def window_indices(s: Signal, n: int, window) -> list[int]:
    """Sample indices i with t_n + lo <= t_i <= t_n + hi."""
    t0 = s.times[n]
    lo, hi = t0 + window.lo, t0 + window.hi
    return [i for i in range(len(s)) if lo <= s.times[i] <= hi]


def eval_oracle(s: Signal, phi, n: int = 0) -> bool:
    """Quantifier semantics by enumeration of sample indices."""
    check_index(s, n)
    if isinstance(phi, Atom):
        return eval_expr(phi.f, s.values[n]) > phi.c
    if isinstance(phi, Not):
        return not eval_oracle(s, phi.arg, n)
    if isinstance(phi, And):
        return eval_oracle(s, phi.left, n) and eval_oracle(s, phi.right, n)
    idx = window_indices(s, n, phi.window)
    if isinstance(phi, Always):
        return all(eval_oracle(s, phi.arg, i) for i in idx)
    if isinstance(phi, Eventually):
        return any(eval_oracle(s, phi.arg, i) for i in idx)
    if isinstance(phi, Until):
        start = s.times[n] + phi.window.lo
        return any(
            eval_oracle(s, phi.right, i)
            and all(eval_oracle(s, phi.left, j) for j in range(len(s)) if start <= s.times[j] <= s.times[i])
            for i in idx
        )
    raise TypeError(f"not a formula: {phi!r}")


def robustness_oracle(s: Signal, phi, n: int = 0) -> float:
    """Set-based robustness (exact min/max over absolute windows)."""
    check_index(s, n)
    if isinstance(phi, Atom):
        return eval_expr(phi.f, s.values[n]) - phi.c
    if isinstance(phi, Not):
        return -robustness_oracle(s, phi.arg, n)
    if isinstance(phi, And):
        return min(robustness_oracle(s, phi.left, n), robustness_oracle(s, phi.right, n))
    idx = window_indices(s, n, phi.window)
    if not idx:
        raise EmptyWindow(f"no samples in window [{phi.window.lo}, {phi.window.hi}] at sample {n}")
    if isinstance(phi, Always):
        return min(robustness_oracle(s, phi.arg, i) for i in idx)
    if isinstance(phi, Eventually):
        return max(robustness_oracle(s, phi.arg, i) for i in idx)
    if isinstance(phi, Until):
        start = s.times[n] + phi.window.lo
        return max(
            min(
                robustness_oracle(s, phi.right, i),
                min(robustness_oracle(s, phi.left, j) for j in range(len(s)) if start <= s.times[j] <= s.times[i]),
            )
            for i in idx
        )
    raise TypeError(f"not a formula: {phi!r}")
