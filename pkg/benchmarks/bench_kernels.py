#!/usr/bin/env python3
"""Time the robustness kernel compiled by numba against the plain numpy path.

Each backend runs in its own interpreter because the choice is fixed at
import time by GRADSTL_NO_NUMBA.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def workloads():
    from gradstl.casestudy import build_constraint, initial_trajectory, load_scenario
    from gradstl.formula import parse_formula
    from gradstl.signal import Signal

    sc = load_scenario()
    yield "case study, 50 samples", initial_trajectory(sc), build_constraint(sc)

    rng = np.random.default_rng(0)
    times = np.cumsum(rng.uniform(0.05, 0.2, 400))
    s = Signal(times, ("x", "y"), rng.normal(size=(400, 2)))
    phi = parse_formula("G[0,20]({x > -2} & F[0,2]{y > 1}) & ({x > 0} U[1,10] {y > 0})", s.names)
    yield "random, 400 samples", s, phi


def child(repeat):
    from gradstl import engine

    out = {"numba": engine.USING_NUMBA, "rows": []}
    for name, s, phi in workloads():
        prog = engine.compile_formula(phi)
        start = time.perf_counter()
        engine.rstar_and_gradient(0.05, s, prog)  # includes compilation on first use
        first = time.perf_counter() - start
        best_v = best_g = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            engine.rstar(0.05, s, prog)
            t1 = time.perf_counter()
            engine.rstar_and_gradient(0.05, s, prog)
            t2 = time.perf_counter()
            best_v, best_g = min(best_v, t1 - t0), min(best_g, t2 - t1)
        out["rows"].append({"workload": name, "first": first, "value": best_v, "gradient": best_g})
    print(json.dumps(out))


def run_backend(disable, repeat):
    env = dict(os.environ, GRADSTL_NO_NUMBA="1" if disable else "0")
    proc = subprocess.run(
        [sys.executable, __file__, "--child", "--repeat", str(repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = p.parse_args()
    if args.child:
        child(args.repeat)
        return

    fast = run_backend(False, args.repeat)
    slow = run_backend(True, args.repeat)
    if not fast["numba"]:
        print("numba is not importable; both runs used the numpy path")
    print(f"{'workload':<24} {'backend':<7} {'first call':>11} {'value':>10} {'gradient':>10}")
    for a, b in zip(fast["rows"], slow["rows"]):
        for label, row in (("numba", a), ("numpy", b)):
            print(
                f"{row['workload']:<24} {label:<7} {row['first'] * 1e3:9.1f}ms "
                f"{row['value'] * 1e3:8.2f}ms {row['gradient'] * 1e3:8.2f}ms"
            )
        print(f"{'':<24} speed-up on gradient: {b['gradient'] / a['gradient']:.0f}x")


if __name__ == "__main__":
    main()
