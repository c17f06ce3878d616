"""Shifted benchmark landscapes F1, F2, F6, F9 (CEC 2005 basic variants).

All are minimisation problems over a box.  Each function has a shift vector
``o`` (the optimum location) and a bias (the objective value at the
optimum); ``error = value - bias`` is the scale-free quality measure used
everywhere in this package.

* F1 sphere:          f(p) = sum(z_i^2) + bias,                    z = p - o
* F2 Schwefel 1.2:    f(p) = sum_i (sum_{j<=i} z_j)^2 + bias,      z = p - o
* F6 Rosenbrock:      f(p) = sum(100 (z_i^2 - z_{i+1})^2
                                   + (z_i - 1)^2) + bias,          z = p - o + 1
* F9 Rastrigin:       f(p) = sum(z_i^2 - 10 cos(2 pi z_i) + 10) + bias

Shift data can come from the official data files (see ``load_shift_data``
and the file naming convention in the README) or from a seeded generator
that places the optimum uniformly in the central 80% of the box.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

FUNCTION_IDS = ("F1", "F2", "F6", "F9")

_BIAS = {"F1": -450.0, "F2": -450.0, "F6": 390.0, "F9": -330.0}
_BOUND = {"F1": 100.0, "F2": 100.0, "F6": 100.0, "F9": 5.0}
_FID_CODE = {"F1": 1, "F2": 2, "F6": 6, "F9": 9}

_TWO_PI = 2.0 * math.pi


class ShiftDataError(ValueError):
    pass


def bounds_for(function_id: str, dimension: int):
    """Per-dimension box bounds as (lo, hi) tuples."""
    if function_id not in _BOUND:
        raise ValueError(f"unknown function id {function_id!r}")
    if dimension < 1:
        raise ValueError("dimension must be >= 1")
    b = _BOUND[function_id]
    return (-b,) * dimension, (b,) * dimension


def bias_for(function_id: str) -> float:
    if function_id not in _BIAS:
        raise ValueError(f"unknown function id {function_id!r}")
    return _BIAS[function_id]


def generated_shift(function_id: str, dimension: int) -> tuple:
    """Deterministic fallback shift: uniform in the central 80% of the box,
    seeded only by the function id and dimension so every run agrees."""
    lo, hi = bounds_for(function_id, dimension)
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=2005, spawn_key=(_FID_CODE[function_id], dimension)))
    span = hi[0] - lo[0]
    draw = rng.uniform(lo[0] + 0.1 * span, hi[0] - 0.1 * span, size=dimension)
    return tuple(float(x) for x in draw)


@dataclass(frozen=True)
class ShiftDataFile:
    function_id: Optional[str]
    dimension: Optional[int]
    values: tuple


def shift_file_name(function_id: str, dimension: int) -> str:
    return f"{function_id}_shift_D{dimension}.txt"


def load_shift_data(path: Union[str, os.PathLike],
                    dimension: Optional[int] = None) -> ShiftDataFile:
    """Load whitespace-separated shift values from a text file.

    Raises :class:`ShiftDataError` with line/column information for
    malformed numbers, and a length error when fewer than ``dimension``
    values are present.  Values beyond the requested dimension are kept and
    ignored at use time.
    """
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            for col_no, token in _tokens_with_columns(line):
                try:
                    values.append(float(token))
                except ValueError:
                    raise ShiftDataError(
                        f"{path}: malformed number {token!r} at line "
                        f"{line_no}, column {col_no}") from None
    if dimension is not None and len(values) < dimension:
        raise ShiftDataError(
            f"{path}: expected at least {dimension} values, found {len(values)}")
    if not values:
        raise ShiftDataError(f"{path}: empty shift data file")
    fid, dim = _parse_shift_file_name(os.path.basename(str(path)))
    return ShiftDataFile(function_id=fid, dimension=dim, values=tuple(values))


def _tokens_with_columns(line: str):
    col = 0
    for token in line.split():
        col = line.index(token, col)
        yield col + 1, token
        col += len(token)


def _parse_shift_file_name(name: str):
    stem = name.rsplit(".", 1)[0]
    parts = stem.split("_shift_D")
    if len(parts) == 2 and parts[0] in _BIAS and parts[1].isdigit():
        return parts[0], int(parts[1])
    return None, None


@dataclass(frozen=True)
class BenchmarkFunction:
    id: str
    dimension: int
    shift: tuple
    bias: float
    bounds_lo: tuple
    bounds_hi: tuple

    def __post_init__(self):
        if len(self.shift) != self.dimension:
            raise ValueError("shift length must equal dimension")
        for o, lo, hi in zip(self.shift, self.bounds_lo, self.bounds_hi):
            if not (lo < o < hi):
                raise ValueError("shift must lie strictly within bounds")

    def evaluate(self, point: Sequence[float]) -> float:
        """Objective value at ``point`` (which may lie outside the bounds).
        Points with non-finite components evaluate to +inf."""
        if len(point) != self.dimension:
            raise ValueError(
                f"point has length {len(point)}, expected {self.dimension}")
        for c in point:
            if not math.isfinite(c):
                return math.inf
        o = self.shift
        fid = self.id
        if fid == "F1":
            s = 0.0
            for p, oo in zip(point, o):
                z = p - oo
                s += z * z
        elif fid == "F2":
            s = 0.0
            prefix = 0.0
            for p, oo in zip(point, o):
                prefix += p - oo
                s += prefix * prefix
        elif fid == "F6":
            s = 0.0
            z0 = point[0] - o[0] + 1.0
            for i in range(self.dimension - 1):
                z1 = point[i + 1] - o[i + 1] + 1.0
                t = z0 * z0 - z1
                u = z0 - 1.0
                s += 100.0 * t * t + u * u
                z0 = z1
            if self.dimension == 1:
                u = z0 - 1.0
                s += u * u
        else:  # F9
            s = 0.0
            for p, oo in zip(point, o):
                z = p - oo
                s += z * z - 10.0 * math.cos(_TWO_PI * z) + 10.0
        return s + self.bias

    def error(self, value: float) -> float:
        return value - self.bias

    def error_at(self, point: Sequence[float]) -> float:
        return self.error(self.evaluate(point))

    def optimum(self) -> tuple:
        return self.shift


ShiftSpec = Union[str, Sequence[float], None]


def make_function(function_id: str, dimension: int,
                  shift: ShiftSpec = "generated",
                  shift_dir: Optional[str] = None) -> BenchmarkFunction:
    """Build a benchmark function.

    ``shift`` may be ``"generated"`` (seeded fallback), ``"zero"``
    (unshifted), an explicit sequence of values, or ``"file"`` to load
    ``<id>_shift_D<dim>.txt`` from ``shift_dir``.
    """
    lo, hi = bounds_for(function_id, dimension)
    if shift == "generated" or shift is None:
        values = generated_shift(function_id, dimension)
    elif shift == "zero":
        values = (0.0,) * dimension
    elif shift == "file":
        if shift_dir is None:
            raise ValueError("shift='file' requires shift_dir")
        path = os.path.join(shift_dir, shift_file_name(function_id, dimension))
        if not os.path.exists(path):
            generic = os.path.join(shift_dir, f"{function_id}_shift.txt")
            path = generic if os.path.exists(generic) else path
        data = load_shift_data(path, dimension=dimension)
        values = data.values[:dimension]
    else:
        values = tuple(float(x) for x in shift)
        if len(values) < dimension:
            raise ShiftDataError(
                f"shift has {len(values)} values, expected {dimension}")
        values = values[:dimension]
    return BenchmarkFunction(id=function_id, dimension=dimension,
                             shift=values, bias=bias_for(function_id),
                             bounds_lo=lo, bounds_hi=hi)
