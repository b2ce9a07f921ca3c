"""Command-line interface.

Exit status: 0 success (``check``: formula satisfied), 1 formula not
satisfied (``check`` only), 2 any error.  Results go to standard output;
diagnostics go to standard error, controlled by ``GRADSTL_LOG`` (off, info,
debug).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import engine
from .casestudy import load_scenario, run_case_study
from .errors import GradStlError
from .formula import parse_formula
from .optimize import OptimizerConfig, optimize_signal
from .semantics import eval_estar
from .signal import load_signal, save_signal, write_matrix_csv

log = logging.getLogger("gradstl")


class StageError(Exception):
    def __init__(self, stage, exc):
        self.stage = stage
        super().__init__(f"{stage}: {exc}")


def _stage(stage, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (GradStlError, OSError, ValueError, IndexError, ArithmeticError, LookupError) as exc:
        raise StageError(stage, exc) from exc


def _load_signal(path):
    from .errors import ValidationError

    try:
        return load_signal(path)
    except ValidationError as exc:
        raise StageError("validate", exc) from exc
    except (GradStlError, OSError, ValueError) as exc:
        raise StageError("parse", exc) from exc


def _formula_text(arg):
    p = Path(arg)
    if p.is_file():
        return p.read_text(encoding="utf-8")
    return arg


def _inputs(args):
    s = _load_signal(args.signal)
    phi = _stage("parse", parse_formula, _formula_text(args.formula), s.names)
    if not 0 <= args.at < len(s):
        raise StageError("validate", f"--at {args.at} outside a {len(s)}-sample signal")
    return s, phi


def _num(x):
    return format(float(x), ".12g")


def cmd_check(args):
    s, phi = _inputs(args)
    ok = _stage("evaluate", eval_estar, s, phi, args.at)
    print("true" if ok else "false")
    return 0 if ok else 1


def cmd_robustness(args):
    s, phi = _inputs(args)
    print(_num(_stage("evaluate", engine.rstar, args.gamma, s, phi, args.at)))
    return 0


def cmd_grad(args):
    if not args.gamma > 0:
        raise StageError("validate", f"--gamma must be > 0 for gradients, got {args.gamma}")
    s, phi = _inputs(args)
    value, grad = _stage("evaluate", engine.rstar_and_gradient, args.gamma, s, phi, args.at)
    log.info("robustness %.12g", value)
    out = args.out if args.out else sys.stdout
    if args.out:
        write_matrix_csv(out, s.names, s.times, grad)
    else:
        sys.stdout.write("t," + ",".join(s.names) + "\n")
        for t, row in zip(s.times, grad):
            sys.stdout.write(",".join(format(float(v), ".17g") for v in (t, *row)) + "\n")
    return 0


def _pins(text, n):
    if not text:
        return []
    try:
        pins = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise StageError("validate", f"--pin expects comma-separated sample indices, got {text!r}") from None
    bad = [p for p in pins if not 0 <= p < n]
    if bad:
        raise StageError("validate", f"--pin indices out of range: {bad}")
    return pins


def cmd_optimize(args):
    s, phi = _inputs(args)
    mask = np.zeros(s.values.shape, dtype=bool)
    mask[_pins(args.pin, len(s))] = True
    cfg = _stage(
        "validate", OptimizerConfig,
        steps=args.steps, learning_rate=args.lr, gamma=args.gamma, pin_mask=mask, at=args.at,
    )
    trace = _stage("evaluate", optimize_signal, s, phi, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_signal(trace.final, out / "final.csv")
    trace.to_csv(out / "trace.csv")
    print(_num(trace.final_hard))
    return 0


def cmd_casestudy(args):
    sc = _stage("parse", load_scenario, args.config)
    report = _stage("evaluate", run_case_study, sc, args.out)
    print(json.dumps(report, indent=2))
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="gradstl", description="Differentiable signal temporal logic.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, gamma=None):
        sp.add_argument("--signal", required=True, help="signal CSV (header t,<names>)")
        sp.add_argument("--formula", required=True, help="formula text or a file containing it")
        sp.add_argument("--at", type=int, default=0, help="sample index to evaluate from")
        if gamma is not None:
            sp.add_argument("--gamma", type=float, default=gamma, help="smoothing parameter")

    sp = sub.add_parser("check", help="boolean satisfaction")
    common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("robustness", help="smooth robustness (gamma <= 0: exact)")
    common(sp, gamma=0.0)
    sp.set_defaults(func=cmd_robustness)

    sp = sub.add_parser("grad", help="robustness gradient as CSV")
    common(sp, gamma=0.1)
    sp.add_argument("--out", help="output CSV (default: standard output)")
    sp.set_defaults(func=cmd_grad)

    sp = sub.add_parser("optimize", help="Adam ascent on robustness")
    common(sp, gamma=0.05)
    sp.add_argument("--steps", type=int, default=500)
    sp.add_argument("--lr", type=float, default=0.05)
    sp.add_argument("--pin", default="", help="comma-separated sample indices to freeze")
    sp.add_argument("--out", required=True, help="output directory")
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("casestudy", help="run the medical-robot scenario")
    sp.add_argument("--config", default=None, help="scenario file (default: packaged scenario)")
    sp.add_argument("--out", required=True, help="output directory")
    sp.set_defaults(func=cmd_casestudy)
    return p


def configure_logging():
    level = os.environ.get("GRADSTL_LOG", "off").strip().lower()
    levels = {"off": logging.CRITICAL + 10, "info": logging.INFO, "debug": logging.DEBUG}
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("gradstl")
    root.handlers[:] = [handler]
    root.setLevel(levels.get(level, logging.CRITICAL + 10))
    root.propagate = False


def main(argv=None):
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"gradstl: error during {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
