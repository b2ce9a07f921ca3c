"""Finite, arbitrarily sampled signals and their CSV representation."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError


@dataclass(frozen=True, eq=False)
class Signal:
    """Samples ``values[k]`` taken at strictly increasing ``times[k]``.

    ``values`` is an n-by-m matrix whose columns are the state variables in
    ``names``.  Arrays are copied and made read-only on construction.
    """

    times: np.ndarray
    names: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        values = np.array(self.values, dtype=float)
        names = tuple(str(n) for n in self.names)
        if times.ndim != 1 or times.size < 1:
            raise ValidationError("a signal needs at least one sample")
        if values.ndim != 2 or values.shape != (times.size, len(names)):
            raise ValidationError(
                f"values shape {values.shape} does not match {times.size} samples x {len(names)} variables"
            )
        if len(names) < 1:
            raise ValidationError("a signal needs at least one state variable")
        if len(set(names)) != len(names) or "t" in names:
            raise ValidationError("variable names must be distinct and must not be 't'")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
            raise ValidationError("signal entries must be finite")
        if np.any(np.diff(times) <= 0.0):
            raise ValidationError("times must be strictly increasing")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "names", names)

    def __len__(self):
        return self.times.size

    @property
    def width(self) -> int:
        return len(self.names)

    def index_of(self, name: str) -> int:
        return self.names.index(name)

    def sample(self, k: int) -> np.ndarray:
        return self.values[k]

    def with_values(self, values) -> Signal:
        return Signal(self.times, self.names, values)

    def __eq__(self, other):
        if not isinstance(other, Signal):
            return NotImplemented
        return (
            self.names == other.names
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def delta_t(s: Signal, k: int) -> float:
    """Time gap ``t[k+1] - t[k]``."""
    if k < 0 or k >= len(s) - 1:
        raise IndexError(f"delta_t undefined at sample {k} of a {len(s)}-sample signal")
    return float(s.times[k + 1] - s.times[k])


def load_signal(path) -> Signal:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row and any(cell.strip() for cell in row)]
    if not rows:
        raise ParseError(f"{path}: empty file")
    header = [cell.strip() for cell in rows[0]]
    if len(header) < 2 or header[0] != "t":
        raise ParseError(f"{path}: header must be 't,<name1>,...'")
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ValidationError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            data.append([float(cell) for cell in row])
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from None
    if not data:
        raise ValidationError(f"{path}: no samples")
    arr = np.array(data, dtype=float)
    try:
        return Signal(arr[:, 0], tuple(header[1:]), arr[:, 1:])
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def write_matrix_csv(path, names, times, matrix):
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", *names])
        for t, row in zip(times, matrix):
            writer.writerow([format(float(t), ".17g"), *(format(float(v), ".17g") for v in row)])


def save_signal(s: Signal, path) -> None:
    write_matrix_csv(path, s.names, s.times, s.values)
