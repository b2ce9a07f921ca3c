import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gradstl.errors import ParseError, ValidationError
from gradstl.signal import Signal, delta_t, load_signal, save_signal

SPEED_TIMES = [0.0, 2.3, 3.9, 7.7, 9.1, 11.4]
SPEED_V = [1.6, 1.9, 12.0, 15.3, 14.2, 28.2]
XYZ_ROWS = [
    (0.0, 0.0, 0.0, 25.0),
    (0.4, 0.1, 0.1, 20.6),
    (2.8, 2.0, 2.4, 8.1),
    (5.0, 18.4, 28.6, 8.2),
    (8.0, 24.7, 26.1, 17.9),
    (9.4, 26.9, 18.2, 17.0),
]


@pytest.fixture
def speed_csv(tmp_path):
    path = tmp_path / "speed_csv.csv"
    path.write_text("t,v\n" + "".join(f"{t},{v}\n" for t, v in zip(SPEED_TIMES, SPEED_V)))
    return path


def test_load_speed_signal(speed_csv):
    s = load_signal(speed_csv)
    assert s.names == ("v",)
    assert list(s.times) == SPEED_TIMES
    assert list(s.values[:, 0]) == SPEED_V


def test_load_three_variables(tmp_path):
    path = tmp_path / "xyz.csv"
    path.write_text("t,x,y,z\n" + "".join(",".join(map(str, r)) + "\n" for r in XYZ_ROWS))
    s = load_signal(path)
    assert s.values.shape == (6, 3)
    assert s.names == ("x", "y", "z")


def test_delta_t_speed_signal(speed_csv):
    s = load_signal(speed_csv)
    assert delta_t(s, 0) == pytest.approx(2.3, abs=1e-12)
    assert delta_t(s, 2) == pytest.approx(3.8, abs=1e-12)
    with pytest.raises(IndexError):
        delta_t(s, 5)


def test_delta_t_uniform():
    s = Signal([0.0, 1.0, 2.0], ("x",), [[0.0], [0.0], [0.0]])
    assert delta_t(s, 1) == 1.0


@pytest.mark.parametrize(
    "body, error",
    [
        ("t,v\n0.0,1\n0.0,2\n", ValidationError),
        ("t,v\n1.0,1\n0.5,2\n", ValidationError),
        ("t,v\n0.0,nan\n", ValidationError),
        ("t,v\n0.0,inf\n", ValidationError),
        ("t,v\n0.0,1,2\n", ValidationError),
        ("t,v\n0.0,abc\n", ParseError),
        ("x,v\n0.0,1\n", ParseError),
        ("", ParseError),
    ],
)
def test_load_rejects(tmp_path, body, error):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(error):
        load_signal(path)


def test_signal_is_immutable():
    s = Signal([0.0, 1.0], ("x",), [[1.0], [2.0]])
    with pytest.raises(ValueError):
        s.values[0, 0] = 5.0


def test_round_trip_minimal(tmp_path):
    s = Signal([3.0], ("x",), [[-1.25]])
    save_signal(s, tmp_path / "s.csv")
    assert load_signal(tmp_path / "s.csv") == s


def test_round_trip_speed_signal(tmp_path, speed_csv):
    s = load_signal(speed_csv)
    save_signal(s, tmp_path / "out.csv")
    assert load_signal(tmp_path / "out.csv") == s


def test_round_trip_random_50(tmp_path):
    rng = np.random.default_rng(7)
    times = np.cumsum(rng.uniform(1e-3, 2.0, 50))
    s = Signal(times, ("a", "b", "c"), rng.normal(scale=1e3, size=(50, 3)))
    save_signal(s, tmp_path / "r.csv")
    back = load_signal(tmp_path / "r.csv")
    assert np.max(np.abs(back.values - s.values)) <= 1e-12
    assert np.max(np.abs(back.times - s.times)) <= 1e-12


finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@settings(max_examples=50, deadline=None)
@given(gaps=st.lists(st.floats(1e-6, 10.0), min_size=1, max_size=20), data=st.data())
def test_delta_t_properties(gaps, data, tmp_path_factory):
    times = np.concatenate([[0.0], np.cumsum(gaps)])
    if np.any(np.diff(times) <= 0):
        return
    values = np.array(data.draw(st.lists(finite, min_size=len(times), max_size=len(times))))[:, None]
    s = Signal(times, ("x",), values)
    dts = [delta_t(s, k) for k in range(len(s) - 1)]
    assert all(d > 0 for d in dts)
    assert abs(sum(dts) - (s.times[-1] - s.times[0])) <= 1e-9
    path = tmp_path_factory.mktemp("rt") / "s.csv"
    save_signal(s, path)
    assert load_signal(path) == s
