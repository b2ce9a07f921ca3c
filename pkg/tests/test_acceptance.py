"""Acceptance checks for the core library.

Each test prints exactly one ``PASS`` or ``FAIL`` line (visible even without
``-s``) and then asserts the same condition.
"""

import json
import math
import time

import numpy as np
import pytest

from gradstl.casestudy import build_constraint, load_scenario, run_case_study
from gradstl.cli import main
from gradstl.expr import Var
from gradstl.formula import Atom, Eventually, Window, depth, size
from gradstl.robustness import LN2, gradient, rstar, smooth_max, smoothing_depth
from gradstl.semantics import eval_estar, eval_estar_stats, eval_oracle
from gradstl.signal import load_signal

from instances import instances, is_nested, smooth_instances, speed_signal

SUITE_SEED = 2024


@pytest.fixture(scope="module")
def suite():
    return instances(SUITE_SEED, 1000)


@pytest.fixture
def report(capsys):
    def emit(name, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {name}: {detail}")
        assert ok, detail

    return emit


def test_worked_window_trace(report):
    s = speed_signal()
    phi = Eventually(Window(5, 10), Atom(Var(0, "v"), 20))
    start = time.perf_counter()
    ok, stats = eval_estar_stats(s, phi)
    elapsed = time.perf_counter() - start
    expected = [(5, 10), (2.7, 7.7), (1.1, 6.1), (-2.7, 2.3), (-4.1, 0.9)]
    windows = [(st.lo, st.hi) for st in stats.steps]
    same = len(windows) == 5 and all(
        abs(a - c) <= 1e-9 and abs(b - d) <= 1e-9 for (a, b), (c, d) in zip(windows, expected)
    )
    stop = [st.n for st in stats.steps if st.base]
    good = ok is False and same and stop == [4] and elapsed < 1e-3
    report("worked window trace", good, f"result={ok} windows={windows} base at {stop} in {elapsed * 1e6:.0f} us")


def test_oracle_equivalence(report, suite):
    start = time.perf_counter()
    bad = sum(eval_estar(s, p, n) != eval_oracle(s, p, n) for s, p, n in suite)
    elapsed = time.perf_counter() - start
    untils = sum("Until(" in repr(p) for _, p, _ in suite)
    nested = sum(is_nested(p) for _, p, _ in suite)
    good = bad == 0 and elapsed < 10 and untils > 0 and nested > 0
    report(
        "oracle equivalence", good,
        f"{len(suite)} instances ({untils} with Until, {nested} nested), {bad} disagreements, {elapsed:.2f} s",
    )


def test_soundness(report, suite):
    hard = 0
    for s, p, n in suite:
        r, e = rstar(0.0, s, p, n), eval_estar(s, p, n)
        hard += (r > 0 and not e) or (r < 0 and e)
    literal = depth_slack = chain_slack = 0
    for g in (0.5, 0.1, 0.01):
        for s, p, n in suite:
            e = eval_estar(s, p, n)
            r0, rg = rstar(0.0, s, p, n), rstar(g, s, p, n)
            d = depth(p) * g * LN2
            L = smoothing_depth(s, p, n) * g * LN2
            literal += r0 > d and not e
            depth_slack += (rg > d and not e) or (rg < -d and e)
            chain_slack += (rg > L and not e) or (rg < -L and e)
    good = hard == literal == depth_slack == chain_slack == 0
    report(
        "soundness", good,
        f"gamma=0 violations {hard}; smoothed violations: exact-value/depth slack {literal}, "
        f"smoothed-value/depth slack {depth_slack}, smoothed-value/chain slack {chain_slack}",
    )


def test_derivative_correctness(report):
    start = time.perf_counter()
    cases = smooth_instances(SUITE_SEED, 500)
    g, h, worst, checked = 0.5, 1e-5, 0.0, 0
    for s, p, n in cases:
        grad = gradient(g, s, p, n)
        for k in range(len(s)):
            for i in range(s.width):
                up, down = s.values.copy(), s.values.copy()
                up[k, i] += h
                down[k, i] -= h
                fd = (rstar(g, s.with_values(up), p, n) - rstar(g, s.with_values(down), p, n)) / (2 * h)
                worst = max(worst, abs(grad[k, i] - fd) / max(1e-4 * abs(fd), 1e-8))
                checked += 1
    elapsed = time.perf_counter() - start
    good = worst <= 1.0 and elapsed < 60
    report(
        "derivative correctness", good,
        f"{len(cases)} instances, {checked} entries, worst error {worst:.3g} of tolerance, {elapsed:.2f} s",
    )


def test_smoothing_limit(report):
    rng = np.random.default_rng(SUITE_SEED)
    pairs = rng.normal(scale=10.0, size=(10000, 2))
    pairs[:1000, 1] = pairs[:1000, 0]  # ties are the worst case
    worst = excess_ulps = 0.0
    for g in (1.0, 0.1, 0.001):
        for a, b in pairs:
            m = max(a, b)
            gap = smooth_max(g, a, b) - m
            worst = max(worst, gap / (g * LN2))
            # rounding of m + gap costs up to half a unit in the last place of the sum
            ulp = np.spacing(max(abs(m), abs(m + gap)))
            excess_ulps = max(excess_ulps, (gap - g * LN2) / ulp)
    exact = all(smooth_max(0.0, a, b) == max(a, b) for a, b in pairs)
    below = all(smooth_max(g, a, b) >= max(a, b) for g in (1.0, 0.1, 0.001) for a, b in pairs[:2000])
    good = excess_ulps <= 1 and exact and below
    report(
        "smoothing limit", good,
        f"max gap / (gamma ln 2) = {worst:.15f} (excess at most {max(excess_ulps, 0):.1f} ulp), "
        f"exact at gamma=0: {exact}",
    )


def test_gradient_modes_agree(report):
    cases = smooth_instances(SUITE_SEED + 1, 100) + instances(SUITE_SEED + 1, 100, nonempty=False)
    worst = 0.0
    for s, p, n in cases:
        a = gradient(0.5, s, p, n, mode="batched")
        b = gradient(0.5, s, p, n, mode="per_variable")
        worst = max(worst, float(np.max(np.abs(a - b), initial=0.0)))
    report("batched vs per-variable gradient", worst <= 1e-12, f"{len(cases)} instances, max difference {worst:.3g}")


def test_case_study(report, tmp_path, capsys):
    sc = load_scenario()
    start = time.perf_counter()
    first = run_case_study(sc, tmp_path / "a")
    elapsed = time.perf_counter() - start
    code = main(["casestudy", "--out", str(tmp_path / "b")])
    capsys.readouterr()
    second = json.loads((tmp_path / "b" / "report.json").read_text())
    same_files = all(
        (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
        for f in ("initial.csv", "final.csv", "trace.csv")
    )
    final = load_signal(tmp_path / "a" / "final.csv")
    phi = build_constraint(sc)
    keys = ("initial_robustness", "final_robustness", "satisfied", "final_smooth_robustness")
    good = (
        code == 0
        and len(final) == 50 and sc.optimizer.steps == 500 and first["steps_run"] == 500
        and first["initial_robustness"] < 0 < first["final_robustness"]
        and first["satisfied"] and eval_estar(final, phi)
        and first["final_smooth_robustness"] > first["initial_smooth_robustness"]
        and same_files and all(first[k] == second[k] for k in keys)
        and elapsed < 300
    )
    report(
        "case study", good,
        f"hard robustness {first['initial_robustness']:.4f} -> {first['final_robustness']:.4f}, "
        f"smooth {first['initial_smooth_robustness']:.4f} -> {first['final_smooth_robustness']:.4f}, "
        f"satisfied={first['satisfied']}, rerun identical={same_files}, {elapsed:.1f} s",
    )


def test_call_count_bound(report, suite):
    flat = over = 0
    nested_ratio = []
    for s, p, n in suite:
        _, stats = eval_estar_stats(s, p, n)
        bound = 4 * len(s) * size(p)
        if is_nested(p):
            nested_ratio.append(stats.call_count / bound)
        else:
            flat += 1
            over += stats.call_count > bound
    report(
        "call count bound", over == 0,
        f"{flat} non-nested instances, {over} over 4|S||phi|; nested: {len(nested_ratio)} recorded, "
        f"max ratio {max(nested_ratio, default=math.nan):.3f}",
    )
