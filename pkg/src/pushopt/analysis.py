"""Cross-function and cross-dimension re-evaluation of evolved optimisers,
plus summary statistics for multi-run error distributions."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .benchmarks import BenchmarkFunction, make_function
from .evaluator import EvaluationConfig, fitness
from .program import Program

# Re-evaluation uses 25 random restarts by default (reporting protocol),
# versus the 10 used during training.
REEVAL_REPEATS = 25
DEFAULT_SWEEP_DIMS = (2, 10, 15, 20)


@dataclass
class GeneralityMatrix:
    row_labels: Tuple[str, ...]
    column_labels: Tuple[str, ...]
    cells: Tuple[Tuple[float, ...], ...]  # [row][column] mean best error

    def cell(self, row_label: str, column_label: str) -> float:
        return self.cells[self.row_labels.index(row_label)][
            self.column_labels.index(column_label)]


@dataclass
class DimensionalitySweep:
    label: str
    function_id: str
    dimensions: Tuple[int, ...]
    cells: Tuple[float, ...]


def _cell_seed(base_seed: int, row: int, col: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=base_seed, spawn_key=(3, row, col))


def generality_matrix(programs: Sequence[Tuple[str, Program]],
                      functions: Sequence[BenchmarkFunction],
                      cfg: Optional[EvaluationConfig] = None,
                      seed: int = 0) -> GeneralityMatrix:
    """Evaluate every labelled program on every function.  Cells are mean
    best errors over ``cfg.repeats`` restarts (default 25)."""
    if cfg is None:
        cfg = EvaluationConfig(repeats=REEVAL_REPEATS)
    rows = []
    for r, (label, program) in enumerate(programs):
        row = []
        for c, fn in enumerate(functions):
            res = fitness(program, fn, cfg, seed=_cell_seed(seed, r, c))
            row.append(res.mean_best_error)
        rows.append(tuple(row))
    return GeneralityMatrix(
        row_labels=tuple(label for label, _ in programs),
        column_labels=tuple(fn.id for fn in functions),
        cells=tuple(rows),
    )


def dimensionality_sweep(label: str, program: Program, function_id: str,
                         dims: Sequence[int] = DEFAULT_SWEEP_DIMS,
                         cfg: Optional[EvaluationConfig] = None,
                         shift: str = "generated",
                         shift_dir: Optional[str] = None,
                         seed: int = 0) -> DimensionalitySweep:
    """Mean best error of one program on one function family across
    dimensionalities, with an identical move budget per episode."""
    if cfg is None:
        cfg = EvaluationConfig(repeats=REEVAL_REPEATS)
    cells = []
    for d_idx, dim in enumerate(dims):
        fn = make_function(function_id, dim, shift=shift, shift_dir=shift_dir)
        res = fitness(program, fn, cfg, seed=_cell_seed(seed, d_idx, 0))
        cells.append(res.mean_best_error)
    return DimensionalitySweep(label=label, function_id=function_id,
                               dimensions=tuple(int(d) for d in dims),
                               cells=tuple(cells))


@dataclass
class DistributionReport:
    count: int
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    threshold: Optional[float]
    below_threshold: int
    values: Tuple[float, ...]


def distribution_report(errors: Sequence[float],
                        threshold: Optional[float] = None) -> DistributionReport:
    """Five-number summary of champion errors plus a count of runs below a
    near-optimal threshold."""
    if len(errors) == 0:
        raise ValueError("distribution_report requires at least one value")
    values = tuple(float(e) for e in errors)
    q1, med, q3 = (float(q) for q in np.quantile(values, (0.25, 0.5, 0.75)))
    below = sum(1 for v in values if threshold is not None and v < threshold)
    return DistributionReport(count=len(values), minimum=min(values), q1=q1,
                              median=med, q3=q3, maximum=max(values),
                              threshold=threshold, below_threshold=below,
                              values=values)


# ---------------------------------------------------------------------------
# renderings

def matrix_csv(matrix: GeneralityMatrix) -> str:
    lines = ["evolved_on," + ",".join(matrix.column_labels)]
    for label, row in zip(matrix.row_labels, matrix.cells):
        lines.append(label + "," + ",".join(repr(c) for c in row))
    return "\n".join(lines) + "\n"


def matrix_text(matrix: GeneralityMatrix) -> str:
    width = max(12, max(len(l) for l in matrix.row_labels) + 2)
    header = "evolved on".rjust(width) + "".join(
        c.rjust(12) for c in matrix.column_labels)
    lines = [header]
    for label, row in zip(matrix.row_labels, matrix.cells):
        lines.append(label.rjust(width) + "".join(
            f"{c:12.3g}" for c in row))
    return "\n".join(lines) + "\n"


def sweep_csv(sweeps: Sequence[DimensionalitySweep]) -> str:
    dims = sweeps[0].dimensions
    lines = ["label,function," + ",".join(f"D{d}" for d in dims)]
    for s in sweeps:
        if s.dimensions != dims:
            raise ValueError("sweeps must share the dimension list")
        lines.append(f"{s.label},{s.function_id}," +
                     ",".join(repr(c) for c in s.cells))
    return "\n".join(lines) + "\n"


def report_text(report: DistributionReport) -> str:
    lines = [
        f"runs:            {report.count}",
        f"min:             {report.minimum!r}",
        f"q1:              {report.q1!r}",
        f"median:          {report.median!r}",
        f"q3:              {report.q3!r}",
        f"max:             {report.maximum!r}",
    ]
    if report.threshold is not None:
        lines.append(f"below {report.threshold!r}: {report.below_threshold}")
    return "\n".join(lines) + "\n"
