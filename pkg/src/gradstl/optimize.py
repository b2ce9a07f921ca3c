"""Adam gradient ascent on a signal's sample values."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import engine
from .errors import NonFiniteGradient
from .signal import Signal

log = logging.getLogger(__name__)


@dataclass
class OptimizerConfig:
    """Adam settings plus the smoothing schedule.

    ``pin_mask`` is an n-by-m boolean array (True = frozen) or None for no
    pinning.  ``gamma_schedule`` is ``"constant"`` or ``"linear"``; the linear
    schedule moves from ``gamma`` at step 0 to ``gamma_final`` at the last
    step.  ``seed`` drives the optional ``init_noise`` perturbation of free
    entries before the first step.
    """

    steps: int = 500
    learning_rate: float = 0.05
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    gamma: float = 0.05
    gamma_schedule: str = "constant"
    gamma_final: float | None = None
    pin_mask: np.ndarray | None = None
    seed: int = 0
    init_noise: float = 0.0
    at: int = 0

    def __post_init__(self):
        if not (isinstance(self.steps, (int, np.integer)) and self.steps >= 1):
            raise ValueError(f"steps must be an integer >= 1, got {self.steps!r}")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be > 0")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("beta1 and beta2 must lie in [0, 1)")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if not (np.isfinite(self.gamma) and self.gamma > 0):
            raise ValueError("gamma must be finite and > 0")
        if self.gamma_schedule not in ("constant", "linear"):
            raise ValueError(f"unknown gamma schedule {self.gamma_schedule!r}")
        if self.gamma_schedule == "linear":
            if self.gamma_final is None or not self.gamma_final > 0:
                raise ValueError("linear schedule needs gamma_final > 0")
        if self.init_noise < 0:
            raise ValueError("init_noise must be >= 0")


def gamma_schedule(step: int, cfg: OptimizerConfig) -> float:
    if cfg.gamma_schedule == "constant" or cfg.steps == 1:
        return cfg.gamma
    frac = step / (cfg.steps - 1)
    return cfg.gamma + (cfg.gamma_final - cfg.gamma) * frac


@dataclass(frozen=True)
class StepRecord:
    step: int
    gamma: float
    smooth_robustness: float
    hard_robustness: float


@dataclass
class OptimizationTrace:
    """Robustness of the signal entering each step, and the final signal."""

    records: list[StepRecord] = field(default_factory=list)
    final: Signal | None = None
    final_smooth: float = float("nan")
    final_hard: float = float("nan")

    def __len__(self):
        return len(self.records)

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["step", "smooth_robustness", "hard_robustness"])
            for r in self.records:
                w.writerow([r.step, format(r.smooth_robustness, ".17g"), format(r.hard_robustness, ".17g")])


class Identity:
    """Parametrization where every signal entry is an independent variable."""

    def expand(self, times, params):
        return params

    def pullback(self, times, params, grad):
        return grad


def optimize_signal(s: Signal, phi, cfg: OptimizerConfig, parametrization=None) -> OptimizationTrace:
    """Run ``cfg.steps`` Adam steps ascending ``rstar(gamma, ., phi, cfg.at)``.

    A ``parametrization`` maps free parameters (same shape as ``s.values``)
    to sample values and pulls value-gradients back to parameters; the case
    study uses one to keep a speed column consistent with positions.
    """
    param = parametrization or Identity()
    prog = engine.compile_formula(phi)
    times = s.times
    frozen = np.zeros(s.values.shape, dtype=bool) if cfg.pin_mask is None else np.asarray(cfg.pin_mask, dtype=bool)
    if frozen.shape != s.values.shape:
        raise ValueError(f"pin_mask shape {frozen.shape} does not match signal {s.values.shape}")
    free = ~frozen

    theta = np.array(s.values, dtype=float)
    if cfg.init_noise > 0:
        rng = np.random.default_rng(cfg.seed)
        theta[free] += cfg.init_noise * rng.standard_normal(int(free.sum()))
    m1 = np.zeros_like(theta)
    m2 = np.zeros_like(theta)
    trace = OptimizationTrace()

    for step in range(cfg.steps):
        gamma = gamma_schedule(step, cfg)
        current = s.with_values(param.expand(times, theta))
        smooth, g_values = engine.rstar_and_gradient(gamma, current, prog, cfg.at)
        hard = engine.rstar(0.0, current, prog, cfg.at)
        trace.records.append(StepRecord(step, gamma, smooth, hard))
        g = param.pullback(times, theta, g_values)
        if not np.all(np.isfinite(g)):
            raise NonFiniteGradient(step)
        g = np.where(free, g, 0.0)

        t = step + 1
        m1 = cfg.beta1 * m1 + (1.0 - cfg.beta1) * g
        m2 = cfg.beta2 * m2 + (1.0 - cfg.beta2) * g * g
        m_hat = m1 / (1.0 - cfg.beta1**t)
        v_hat = m2 / (1.0 - cfg.beta2**t)
        theta = np.where(free, theta + cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon), theta)
        if step % 50 == 0:
            log.debug("step %d gamma=%.4g smooth=%.6g hard=%.6g", step, gamma, smooth, hard)

    final = s.with_values(param.expand(times, theta))
    last_gamma = gamma_schedule(cfg.steps - 1, cfg)
    trace.final = final
    trace.final_smooth = engine.rstar(last_gamma, final, prog, cfg.at)
    trace.final_hard = engine.rstar(0.0, final, prog, cfg.at)
    log.info("optimized %d steps: hard robustness %.6g -> %.6g", cfg.steps, trace.records[0].hard_robustness, trace.final_hard)
    return trace
