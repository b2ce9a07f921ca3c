"""Medical-robot navigation scenario.

A robot starts at its dock, fetches medicine from a cabinet (dwelling in the
access area), takes it to the bedside (dwelling again), and returns to the
dock, while staying below a speed limit and out of the desk, chair and bed
footprints.  The initial trajectory is straight lines between task locations
at uniform speed, sampled more densely on one risky segment.
"""

from __future__ import annotations

import configparser
import json
import logging
import time
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigError, ValidationError
from .expr import Add, Constant, Mul, Neg, PowInt, Sub, Var
from .formula import Always, Atom, Eventually, Not, Window, conjunction
from .optimize import OptimizerConfig, optimize_signal
from .semantics import eval_estar
from .signal import Signal, save_signal
from . import engine

log = logging.getLogger(__name__)

NAMES = ("x", "y", "v")
X, Y, V = (Var(i, n) for i, n in enumerate(NAMES))
OBSTACLES = ("desk", "chair", "bed")
TASKS = ("access", "bedside", "dock")


@dataclass(frozen=True)
class Region:
    """Rectangle ``(xmin, xmax, ymin, ymax)`` or circle ``(cx, cy, radius)``, in metres."""

    name: str
    kind: str
    params: tuple

    def __post_init__(self):
        if self.kind == "rectangle":
            if len(self.params) != 4:
                raise ValueError(f"{self.name}: rectangle needs xmin xmax ymin ymax")
            xmin, xmax, ymin, ymax = self.params
            if not (xmin < xmax and ymin < ymax):
                raise ValueError(f"{self.name}: empty rectangle {self.params}")
        elif self.kind == "circle":
            if len(self.params) != 3:
                raise ValueError(f"{self.name}: circle needs cx cy radius")
            if not self.params[2] > 0:
                raise ValueError(f"{self.name}: radius must be positive")
        else:
            raise ValueError(f"{self.name}: unknown region kind {self.kind!r}")

    @property
    def centre(self) -> tuple[float, float]:
        if self.kind == "circle":
            return self.params[0], self.params[1]
        xmin, xmax, ymin, ymax = self.params
        return (xmin + xmax) / 2, (ymin + ymax) / 2

    def contains(self, x: float, y: float) -> bool:
        if self.kind == "circle":
            cx, cy, r = self.params
            return (x - cx) ** 2 + (y - cy) ** 2 < r * r
        xmin, xmax, ymin, ymax = self.params
        return xmin < x < xmax and ymin < y < ymax


def region_formula(r: Region, inside: bool = True, x: Var = X, y: Var = Y):
    """Atoms on the x, y coordinates that hold strictly inside ``r``."""
    if r.kind == "rectangle":
        xmin, xmax, ymin, ymax = r.params
        phi = conjunction([
            Atom(Sub(x, Constant(xmin)), 0.0),
            Atom(Sub(Constant(xmax), x), 0.0),
            Atom(Sub(y, Constant(ymin)), 0.0),
            Atom(Sub(Constant(ymax), y), 0.0),
        ])
    else:
        cx, cy, rad = r.params
        dist2 = Add(PowInt(Sub(x, Constant(cx)), 2), PowInt(Sub(y, Constant(cy)), 2))
        phi = Atom(Sub(Constant(rad * rad), dist2), 0.0)
    return phi if inside else Not(phi)


@dataclass
class Scenario:
    regions: dict
    waypoints: tuple = ("dock", "access", "bedside", "dock")
    horizon: float = 50.0
    dwell: float = 5.0
    speed_limit: float = 1.5
    sample_count: int = 50
    dense_segment: int = 1
    density: float = 3.0
    speed_mode: str = "derived"
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    def __post_init__(self):
        missing = [n for n in OBSTACLES + TASKS if n not in self.regions]
        if missing:
            raise ValidationError(f"scenario lacks regions: {', '.join(missing)}")
        if not (self.horizon > 0 and self.dwell > 0 and self.speed_limit > 0):
            raise ValidationError("horizon, dwell and speed_limit must be positive")
        if self.sample_count < 2:
            raise ValidationError("sample_count must be at least 2")
        if len(self.waypoints) < 2:
            raise ValidationError("need at least two waypoints")
        if not 0 <= self.dense_segment < len(self.waypoints) - 1:
            raise ValidationError(f"dense_segment {self.dense_segment} is not a path segment")
        if not self.density > 0:
            raise ValidationError("density must be positive")
        if self.speed_mode not in ("derived", "free"):
            raise ValidationError(f"unknown speed_mode {self.speed_mode!r}")
        for name in self.waypoints:
            if name not in self.regions:
                raise ValidationError(f"waypoint {name!r} is not a region")
            px, py = self.regions[name].centre
            if not self.regions[name].contains(px, py):
                raise ValidationError(f"waypoint {name!r} lies outside its region")
            for obs in OBSTACLES:
                if self.regions[obs].contains(px, py):
                    raise ValidationError(f"waypoint {name!r} lies inside obstacle {obs!r}")


def build_constraint(sc: Scenario):
    H = Window(0.0, sc.horizon)
    dwell = Window(0.0, sc.dwell)
    reg = sc.regions
    speed = Always(H, Atom(Neg(V), -sc.speed_limit))
    avoid = [Always(H, region_formula(reg[name], inside=False)) for name in OBSTACLES]
    home = Eventually(H, Always(H, region_formula(reg["dock"])))
    bedside = Eventually(H, conjunction([Always(dwell, region_formula(reg["bedside"])), home]))
    tasks = Eventually(H, conjunction([Always(dwell, region_formula(reg["access"])), bedside]))
    return conjunction([speed, *avoid, tasks])


# -- trajectory --------------------------------------------------------------


def speeds(times, xs, ys) -> np.ndarray:
    """Forward-difference speed; the last sample repeats its predecessor."""
    dist = np.hypot(np.diff(xs), np.diff(ys))
    v = np.empty(len(times))
    v[:-1] = dist / np.diff(times)
    v[-1] = v[-2]
    return v


class SpeedFromPositions:
    """Parametrization keeping the speed column derived from positions."""

    def __init__(self, xi=0, yi=1, vi=2):
        self.xi, self.yi, self.vi = xi, yi, vi

    def expand(self, times, params):
        out = np.array(params, dtype=float)
        out[:, self.vi] = speeds(times, out[:, self.xi], out[:, self.yi])
        return out

    def pullback(self, times, params, grad):
        grad = np.array(grad, dtype=float)
        gv = grad[:, self.vi].copy()
        grad[:, self.vi] = 0.0
        gv[-2] += gv[-1]
        dx = np.diff(params[:, self.xi])
        dy = np.diff(params[:, self.yi])
        dist = np.hypot(dx, dy)
        with np.errstate(invalid="ignore", divide="ignore"):
            scale = np.where(dist > 0, gv[:-1] / (dist * np.diff(times)), 0.0)
        grad[1:, self.xi] += scale * dx
        grad[:-1, self.xi] -= scale * dx
        grad[1:, self.yi] += scale * dy
        grad[:-1, self.yi] -= scale * dy
        return grad


def sample_times(sc: Scenario, seg_times: np.ndarray) -> np.ndarray:
    """Sample times with ``density`` times more samples per second on the dense segment."""
    weights = np.ones(len(seg_times) - 1)
    weights[sc.dense_segment] = sc.density
    cum = np.concatenate([[0.0], np.cumsum(weights * np.diff(seg_times))])
    u = np.linspace(0.0, cum[-1], sc.sample_count)
    t = np.interp(u, cum, seg_times)
    t[0], t[-1] = 0.0, sc.horizon
    return t


def initial_trajectory(sc: Scenario) -> Signal:
    pts = np.array([sc.regions[name].centre for name in sc.waypoints], dtype=float)
    lengths = np.hypot(*np.diff(pts, axis=0).T)
    seg_times = np.concatenate([[0.0], np.cumsum(lengths)]) * (sc.horizon / lengths.sum())
    seg_times[-1] = sc.horizon
    times = sample_times(sc, seg_times)
    if np.any(np.diff(times) <= 0):
        raise ValidationError("sample times are not strictly increasing")
    xs = np.interp(times, seg_times, pts[:, 0])
    ys = np.interp(times, seg_times, pts[:, 1])
    return Signal(times, NAMES, np.column_stack([xs, ys, speeds(times, xs, ys)]))


def default_pin_mask(s: Signal, speed_mode: str) -> np.ndarray:
    mask = np.zeros(s.values.shape, dtype=bool)
    mask[0, :2] = True
    if speed_mode == "derived":
        mask[:, 2] = True
    return mask


def run_case_study(sc: Scenario, out_dir) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    phi = build_constraint(sc)
    s0 = initial_trajectory(sc)
    cfg = replace(sc.optimizer, pin_mask=default_pin_mask(s0, sc.speed_mode))
    param = SpeedFromPositions() if sc.speed_mode == "derived" else None
    trace = optimize_signal(s0, phi, cfg, parametrization=param)
    final = trace.final
    satisfied = eval_estar(final, phi, 0)
    elapsed = time.perf_counter() - start

    save_signal(s0, out / "initial.csv")
    save_signal(final, out / "final.csv")
    trace.to_csv(out / "trace.csv")
    report = {
        "initial_robustness": engine.rstar(0.0, s0, phi, 0),
        "final_robustness": trace.final_hard,
        "satisfied": bool(satisfied),
        "initially_satisfied": bool(eval_estar(s0, phi, 0)),
        "initial_smooth_robustness": trace.records[0].smooth_robustness,
        "final_smooth_robustness": trace.final_smooth,
        "steps_run": len(trace),
        "gamma": cfg.gamma,
        "speed_mode": sc.speed_mode,
        "wall_time_seconds": elapsed,
    }
    with (out / "report.json").open("w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    if not satisfied:
        log.warning("final trajectory does not satisfy the constraint (robustness %.4g)", trace.final_hard)
    return report


# -- configuration file ------------------------------------------------------

DEFAULT_CONFIG = "default_scenario.ini"


def default_config_path() -> Path:
    return Path(str(resources.files("gradstl") / "data" / DEFAULT_CONFIG))


def _get(cp, section, key, conv, default=None):
    full = f"{section}.{key}"
    if not cp.has_option(section, key):
        if default is None:
            raise ConfigError(full, "missing")
        return default
    raw = cp.get(section, key)
    try:
        return conv(raw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(full, f"cannot parse {raw!r}: {exc}") from None


def _region(name, raw):
    parts = raw.split()
    if not parts:
        raise ValueError("empty region")
    kind = {"rect": "rectangle", "rectangle": "rectangle", "circle": "circle"}.get(parts[0])
    if kind is None:
        raise ValueError(f"unknown region kind {parts[0]!r}")
    return Region(name, kind, tuple(float(p) for p in parts[1:]))


def load_scenario(path=None) -> Scenario:
    path = Path(path) if path is not None else default_config_path()
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with path.open(encoding="utf-8") as fh:
            cp.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(str(path), f"malformed file: {exc}") from None
    for section in ("regions", "waypoints", "timing", "optimizer"):
        if not cp.has_section(section):
            raise ConfigError(section, "missing section")

    regions = {}
    for name in cp.options("regions"):
        regions[name] = _get(cp, "regions", name, lambda raw, n=name: _region(n, raw))
    order = _get(cp, "waypoints", "order", lambda raw: tuple(p.strip() for p in raw.split(",") if p.strip()))

    def positive_int(raw):
        v = int(raw)
        if v < 1:
            raise ValueError("must be >= 1")
        return v

    schedule = _get(cp, "optimizer", "gamma_schedule", str, "constant")
    opt = dict(
        steps=_get(cp, "optimizer", "steps", positive_int),
        learning_rate=_get(cp, "optimizer", "learning_rate", float),
        beta1=_get(cp, "optimizer", "beta1", float, 0.9),
        beta2=_get(cp, "optimizer", "beta2", float, 0.999),
        epsilon=_get(cp, "optimizer", "epsilon", float, 1e-8),
        gamma=_get(cp, "optimizer", "gamma", float),
        gamma_schedule=schedule,
        gamma_final=_get(cp, "optimizer", "gamma_final", float) if schedule == "linear" else None,
        seed=_get(cp, "optimizer", "seed", int, 0),
    )
    try:
        optimizer = OptimizerConfig(**opt)
    except ValueError as exc:
        raise ConfigError("optimizer", str(exc)) from None

    kwargs = dict(
        regions=regions,
        waypoints=order,
        horizon=_get(cp, "timing", "horizon", float),
        dwell=_get(cp, "timing", "dwell", float),
        speed_limit=_get(cp, "timing", "speed_limit", float),
        sample_count=_get(cp, "timing", "sample_count", positive_int),
        dense_segment=_get(cp, "timing", "dense_segment", int),
        density=_get(cp, "timing", "density", float),
        speed_mode=_get(cp, "optimizer", "speed_mode", str, "derived"),
        optimizer=optimizer,
    )
    try:
        return Scenario(**kwargs)
    except ValidationError as exc:
        raise ConfigError(str(path), str(exc)) from None
