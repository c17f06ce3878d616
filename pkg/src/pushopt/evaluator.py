"""Scoring a Push program as a local optimiser.

One episode runs the program once per move inside a managed stack protocol:

* Episode start: clear all stacks.  Draw the start point p0 uniformly inside
  the bounds and evaluate it (v0).  Load the input stack with the scalar
  box bounds (lo, hi), p0 and v0; also push p0 to the vector stack, v0 to
  the float stack and ``true`` to the boolean stack.  The running best
  starts at the initial point.
* Each move m = 1..moves: push m to the integer stack, execute the program
  under the instruction budget, then pop the vector stack to get the
  proposed point (an empty vector stack proposes the previous point
  unchanged).  The proposal is evaluated even when it lies outside the
  bounds; proposals with non-finite components score +inf.  The best
  value/point pair updates on strict improvement.
* Reload: the input stack is cleared and refilled with (lo, hi, v) and v is
  pushed once onto the float stack.  If the proposal was inside the bounds,
  the improvement flag (v < previous v) is pushed to the boolean stack, the
  proposal and v are appended to the input stack, and the vector stack
  receives the best-so-far point with the proposal pushed back on top of
  it.  Out-of-bounds moves instead push ``false`` to the boolean stack,
  +inf to the float stack and only the best point to the vector stack (the
  bad proposal is not re-offered, and programs whose only vector source is
  the stack itself can always continue).  No other stack is touched between
  moves.

Keeping both points on the vector stack, proposal on top of best, is what
makes published evolved optimisers behave as described: a leading
``vector.pop`` or ``yank``/``pop`` shuffle discards the proposal and bases
the next move on the best point, while programs without one walk from the
point they proposed last.

Fitness is the mean of the per-episode best errors over independent
restarts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .benchmarks import BenchmarkFunction
from .interpreter import execute
from .program import Program
from .state import Environment, PushState

SeedLike = Union[int, np.random.SeedSequence, None]


@dataclass(frozen=True)
class EvaluationConfig:
    repeats: int = 10
    moves: int = 1000
    exec_budget: int = 100
    record_trajectory: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.moves < 1:
            raise ValueError("moves must be >= 1")


@dataclass(frozen=True)
class TrajectoryRow:
    move: int
    point: tuple
    value: float
    in_bounds: bool


@dataclass
class EpisodeResult:
    best_error: float
    best_point: tuple
    evaluations: int
    trajectory: Optional[List[TrajectoryRow]] = None


@dataclass
class FitnessResult:
    mean_best_error: float
    per_episode: List[EpisodeResult]


def _as_seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def _uniform_point(rng: np.random.Generator, lo: tuple, hi: tuple) -> tuple:
    draw = rng.uniform(np.asarray(lo), np.asarray(hi))
    return tuple(float(x) for x in draw)


def _finite(point: tuple) -> bool:
    for c in point:
        if not math.isfinite(c):
            return False
    return True


def _within_bounds(point: tuple, lo: tuple, hi: tuple) -> bool:
    for c, l, h in zip(point, lo, hi):
        if not (l <= c <= h) or not math.isfinite(c):
            return False
    return True


# Number of times the new objective value is pushed onto the float stack
# during the between-move reload (the input stack always receives it twice
# on an in-bounds move).  Kept in one place so the protocol can be flipped.
# With 2 pushes, evolved programs whose per-move float consumption is lower
# than the push rate never see their own float results again; 1 preserves
# published program behaviour.
VALUE_FLOAT_PUSHES = 1


def _reload_stacks(st: PushState, lo_f: float, hi_f: float, value: float,
                   previous_value: float, proposal: tuple, best_point: tuple,
                   in_bounds: bool) -> None:
    """The between-move stack protocol (see the module docstring)."""
    st.inputs = [lo_f, hi_f, value]
    if VALUE_FLOAT_PUSHES >= 1:
        st.floats.append(value)
    if in_bounds:
        st.booleans.append(value < previous_value)
        st.inputs.append(proposal)
        st.inputs.append(value)
        if VALUE_FLOAT_PUSHES >= 2:
            st.floats.append(value)
        st.vectors.append(best_point)
        st.vectors.append(proposal)
    else:
        st.booleans.append(False)
        st.floats.append(math.inf)
        st.vectors.append(best_point)


def run_episode(program: Program, fn: BenchmarkFunction, cfg: EvaluationConfig,
                rng: np.random.Generator, registry=None,
                observer: Optional[Callable[[int, PushState], None]] = None
                ) -> EpisodeResult:
    """Run one optimisation episode and return its result.

    ``observer``, when given, is called as ``observer(move, state)`` right
    before each program execution (after the move counter push); tests use
    it to check the documented stack protocol.
    """
    lo, hi = fn.bounds_lo, fn.bounds_hi
    env = Environment(fn.dimension, lo, hi, rng=rng, registry=registry,
                      exec_budget=cfg.exec_budget)
    st = PushState(env)
    lo_f, hi_f = lo[0], hi[0]

    point = _uniform_point(rng, lo, hi)
    value = fn.evaluate(point)
    best_value = value
    best_point = point
    evaluations = 1

    st.clear()
    st.inputs = [lo_f, hi_f, point, value]
    st.vectors.append(point)
    st.floats.append(value)
    st.booleans.append(True)

    trajectory = [TrajectoryRow(0, point, value, True)] if cfg.record_trajectory else None

    for move in range(1, cfg.moves + 1):
        st.integers.append(move)
        if observer is not None:
            observer(move, st)
        execute(program, st, cfg.exec_budget)

        proposal = st.vectors.pop() if st.vectors else point
        previous_value = value
        value = fn.evaluate(proposal) if _finite(proposal) else math.inf
        evaluations += 1
        if value < best_value:
            best_value = value
            best_point = proposal

        in_bounds = _within_bounds(proposal, lo, hi)
        _reload_stacks(st, lo_f, hi_f, value, previous_value, proposal,
                       best_point, in_bounds)
        point = proposal
        if trajectory is not None:
            trajectory.append(TrajectoryRow(move, proposal, value, in_bounds))

    return EpisodeResult(best_error=fn.error(best_value), best_point=best_point,
                         evaluations=evaluations, trajectory=trajectory)


def episode_seed_sequences(seed: SeedLike, repeats: int) -> list:
    return _as_seed_sequence(seed).spawn(repeats)


def fitness(program: Program, fn: BenchmarkFunction, cfg: EvaluationConfig,
            seed: SeedLike = None, registry=None) -> FitnessResult:
    """Mean best error over ``cfg.repeats`` independent episodes.

    Episode RNG streams are spawned deterministically from ``seed`` (which
    defaults to ``cfg.seed``), so results do not depend on execution order
    and episodes may safely be farmed out concurrently.
    """
    if seed is None:
        seed = cfg.seed
    episodes = []
    for ss in episode_seed_sequences(seed, cfg.repeats):
        rng = np.random.default_rng(ss)
        episodes.append(run_episode(program, fn, cfg, rng, registry=registry))
    mean = sum(e.best_error for e in episodes) / len(episodes)
    return FitnessResult(mean_best_error=mean, per_episode=episodes)


def random_search_baseline(fn: BenchmarkFunction, evaluations: int,
                           seed: SeedLike = None) -> float:
    """Best error of plain uniform random search with the given evaluation
    budget.  Independent of the interpreter; used as an oracle."""
    rng = np.random.default_rng(_as_seed_sequence(seed))
    lo = np.asarray(fn.bounds_lo)
    hi = np.asarray(fn.bounds_hi)
    best = math.inf
    for _ in range(evaluations):
        v = fn.evaluate(tuple(float(x) for x in rng.uniform(lo, hi)))
        if v < best:
            best = v
    return fn.error(best)


def random_search_mean(fn: BenchmarkFunction, evaluations: int, repeats: int,
                       seed: SeedLike = None) -> float:
    """Mean of ``repeats`` independent random-search best errors."""
    seqs = episode_seed_sequences(seed, repeats)
    return sum(random_search_baseline(fn, evaluations, s) for s in seqs) / repeats


# ---------------------------------------------------------------------------
# trajectory files

def format_trajectory_header(fn: BenchmarkFunction, seed, config_note: str = "") -> str:
    shift = ",".join(repr(x) for x in fn.shift)
    extra = f" {config_note}" if config_note else ""
    return (f"# function={fn.id} dim={fn.dimension} lo={fn.bounds_lo[0]!r} "
            f"hi={fn.bounds_hi[0]!r} bias={fn.bias!r} shift={shift} seed={seed}{extra}")


def trajectory_lines(fn: BenchmarkFunction, result: EpisodeResult, seed) -> List[str]:
    if result.trajectory is None:
        raise ValueError("episode was run without trajectory recording")
    d = fn.dimension
    header_cols = ",".join(f"x{i}" for i in range(d))
    lines = [format_trajectory_header(fn, seed),
             f"move,{header_cols},value,in_bounds,best_error"]
    best = math.inf
    for row in result.trajectory:
        if row.value < best:
            best = row.value
        coords = ",".join(repr(c) for c in row.point)
        lines.append(f"{row.move},{coords},{row.value!r},"
                     f"{int(row.in_bounds)},{fn.error(best)!r}")
    return lines


def trace(program: Program, fn: BenchmarkFunction, cfg: EvaluationConfig,
          path, seed: SeedLike = None, registry=None) -> EpisodeResult:
    """Run a single recorded episode and write it as CSV.

    The file has one comment header line naming the function, bounds, shift
    and seed, a column header, then one row per evaluation: the initial
    point plus one row per move."""
    if seed is None:
        seed = cfg.seed
    recording_cfg = replace(cfg, record_trajectory=True)
    ss = _as_seed_sequence(seed)
    rng = np.random.default_rng(ss.spawn(1)[0])
    result = run_episode(program, fn, recording_cfg, rng, registry=registry)
    lines = trajectory_lines(fn, result, seed if isinstance(seed, int) else "derived")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return result
