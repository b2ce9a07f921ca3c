"""Differentiable signal temporal logic over arbitrarily sampled signals."""

from .errors import *  # noqa: F401,F403
from .expr import d_expr, eval_expr, parse_expr, print_expr
from .formula import (
    Always, And, Atom, Eventually, Not, Until, Window,
    derived_or, parse_formula, print_formula, size,
)
from .robustness import d_smooth_max, d_smooth_min, drstar, gradient, rstar, smooth_max, smooth_min
from .semantics import EvalStats, eval_estar, eval_estar_stats, eval_oracle, robustness_oracle
from .signal import Signal, delta_t, load_signal, save_signal

__version__ = "0.1.0"
