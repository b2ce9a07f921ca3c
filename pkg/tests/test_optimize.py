import numpy as np
import pytest

from gradstl.errors import NonFiniteGradient
from gradstl.expr import Constant, Div, Var
from gradstl.formula import Atom, Eventually, Window
from gradstl.optimize import OptimizerConfig, gamma_schedule, optimize_signal
from gradstl.signal import Signal

X, Y = Var(0, "x"), Var(1, "y")


def test_single_atom_reaches_satisfaction():
    s = Signal([0.0], ("x",), [[-1.0]])
    trace = optimize_signal(s, Atom(X, 0.0), OptimizerConfig(steps=200, learning_rate=0.1, gamma=0.1))
    assert trace.final.values[0, 0] > 0
    assert trace.final_hard > 0
    assert trace.final_smooth > trace.records[0].smooth_robustness
    assert len(trace) == 200
    assert trace.records[0].hard_robustness == -1.0


def test_everything_pinned_leaves_signal_unchanged():
    s = Signal([0.0, 1.0], ("x", "y"), [[-1.0, 2.0], [0.5, -3.0]])
    cfg = OptimizerConfig(steps=20, pin_mask=np.ones((2, 2), dtype=bool))
    assert optimize_signal(s, Atom(X, 0.0), cfg).final == s


def test_zero_gradient_leaves_signal_unchanged():
    s = Signal([0.0, 1.0], ("x", "y"), [[-1.0, 2.0], [0.5, -3.0]])
    mask = np.zeros((2, 2), dtype=bool)
    mask[:, 1] = True
    trace = optimize_signal(s, Eventually(Window(0, 1), Atom(Y, 5.0)), OptimizerConfig(steps=20, pin_mask=mask))
    assert trace.final == s


def test_pinned_entries_stay_exact():
    s = Signal([0.0, 1.0, 2.0], ("x",), [[-1.0], [-2.0], [-3.0]])
    mask = np.array([[True], [False], [True]])
    trace = optimize_signal(s, Eventually(Window(0, 2), Atom(X, 0.0)), OptimizerConfig(steps=50, pin_mask=mask))
    assert trace.final.values[0, 0] == -1.0 and trace.final.values[2, 0] == -3.0
    assert trace.final.values[1, 0] != -2.0


def test_gamma_schedule():
    assert gamma_schedule(17, OptimizerConfig(gamma=0.3)) == 0.3
    cfg = OptimizerConfig(steps=500, gamma=1.0, gamma_schedule="linear", gamma_final=0.1)
    assert gamma_schedule(0, cfg) == 1.0
    assert abs(gamma_schedule(499, cfg) - 0.1) <= 1e-12


@pytest.mark.parametrize(
    "kwargs",
    [
        {"steps": 0}, {"learning_rate": 0.0}, {"gamma": 0.0}, {"beta1": 1.0},
        {"gamma_schedule": "cosine"}, {"gamma_schedule": "linear"}, {"init_noise": -1.0},
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        OptimizerConfig(**kwargs)


def test_bad_mask_shape():
    s = Signal([0.0], ("x",), [[-1.0]])
    with pytest.raises(ValueError):
        optimize_signal(s, Atom(X, 0.0), OptimizerConfig(steps=1, pin_mask=np.ones((2, 1), dtype=bool)))


def test_deterministic():
    s = Signal([0.0, 0.5, 1.5], ("x", "y"), [[-1.0, 0.0], [0.2, 0.3], [1.0, -2.0]])
    phi = Eventually(Window(0, 1), Atom(Y, 1.0))
    cfg = OptimizerConfig(steps=40, init_noise=0.1, seed=3)
    a, b = optimize_signal(s, phi, cfg), optimize_signal(s, phi, cfg)
    assert a.final == b.final
    assert a.records == b.records


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_non_finite_gradient_is_reported():
    # d(1/x)/dx = -1/x^2 overflows for tiny x
    s = Signal([0.0], ("x",), [[1e-200]])
    with pytest.raises(NonFiniteGradient) as err:
        optimize_signal(s, Atom(Div(Constant(1.0), X), 1.0), OptimizerConfig(steps=3))
    assert err.value.step == 0
