"""Generational GP over Push programs.

Selection is tournament (single-objective) or lexicase (one fitness case
per training function).  Variation is subtree crossover and subtree
mutation with a hard program size limit.  Fitness cases are re-sampled
with fresh random starting points every generation, so selection always
sees current scores; the reported best-ever individual tracks the minimum
scalar fitness observed anywhere in the run, which makes it non-increasing
by construction.

Every random draw flows from the master seed through named sub-streams
(``spawn_key`` tuples), so results are identical however individual
evaluations are scheduled.
"""
from __future__ import annotations

import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .benchmarks import BenchmarkFunction
from .evaluator import EvaluationConfig, fitness
from .interpreter import random_program, random_subtree
from .program import (Program, count_points, format_program, iter_atoms,
                      replace_subtree, subtree_at)
from .state import ERC_FLOAT_HI, ERC_FLOAT_LO

# spawn_key tags for the named RNG sub-streams
_KEY_INIT = 0
_KEY_VARIATION = 1
_KEY_EVAL = 2


@dataclass(frozen=True)
class EvolutionConfig:
    functions: Tuple[BenchmarkFunction, ...]
    evaluation: EvaluationConfig = EvaluationConfig()
    population_size: int = 200
    generations: int = 50
    tournament_size: int = 5
    program_size_limit: int = 100
    selection: str = "tournament"  # or "lexicase"
    crossover_rate: float = 0.7
    mutation_rate: float = 0.2
    reproduction_rate: float = 0.1
    epsilon_lexicase: bool = False
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        rates = self.crossover_rate + self.mutation_rate + self.reproduction_rate
        if abs(rates - 1.0) > 1e-9:
            raise ValueError("operator rates must sum to 1")
        if self.population_size < self.tournament_size:
            raise ValueError("population must be at least the tournament size")
        if self.selection not in ("tournament", "lexicase"):
            raise ValueError(f"unknown selection {self.selection!r}")
        if not self.functions:
            raise ValueError("at least one training function is required")


@dataclass
class Individual:
    program: Program
    fitness_cases: Tuple[float, ...] = ()
    scalar_fitness: float = math.inf


@dataclass
class GenerationStats:
    generation: int
    best_fitness: float
    median_fitness: float
    mean_points: float
    best_program: str


def initialize(cfg: EvolutionConfig, rng: np.random.Generator) -> List[Individual]:
    return [Individual(random_program(cfg.program_size_limit, rng))
            for _ in range(cfg.population_size)]


def tournament_select(population: Sequence[Individual], k: int,
                      rng: np.random.Generator) -> Individual:
    """Sample ``k`` individuals uniformly with replacement and return one of
    the lowest-fitness entrants, ties broken uniformly."""
    idxs = rng.integers(0, len(population), size=k)
    best_fit = math.inf
    best: List[Individual] = []
    for i in idxs:
        ind = population[i]
        f = ind.scalar_fitness
        if f < best_fit:
            best_fit = f
            best = [ind]
        elif f == best_fit:
            best.append(ind)
    return best[int(rng.integers(0, len(best)))]


def lexicase_select(population: Sequence[Individual],
                    rng: np.random.Generator,
                    epsilon: bool = False) -> Individual:
    """Standard lexicase: filter candidates to the case-elites in a random
    case order; pick uniformly among the survivors."""
    n_cases = len(population[0].fitness_cases)
    candidates = list(population)
    for case in rng.permutation(n_cases):
        if len(candidates) == 1:
            break
        errors = [ind.fitness_cases[case] for ind in candidates]
        best = min(errors)
        threshold = best
        if epsilon:
            med = statistics.median(errors)
            mad = statistics.median(abs(e - med) for e in errors)
            threshold = best + mad
        candidates = [ind for ind, e in zip(candidates, errors) if e <= threshold]
    return candidates[int(rng.integers(0, len(candidates)))]


def _select(population, cfg: EvolutionConfig, rng) -> Individual:
    if cfg.selection == "lexicase":
        return lexicase_select(population, rng, epsilon=cfg.epsilon_lexicase)
    return tournament_select(population, cfg.tournament_size, rng)


def crossover(a: Program, b: Program, rng: np.random.Generator,
              size_limit: int = 100) -> Program:
    """Replace a uniform-random non-root point of ``a`` with a
    uniform-random non-root subtree of ``b``.  Children over the size limit
    are discarded in favour of a copy of ``a``."""
    if a.points < 2 or b.points < 2:
        return a
    target = int(rng.integers(1, a.points))
    source = int(rng.integers(1, b.points))
    child_root = replace_subtree(a.root, target, subtree_at(b.root, source))
    child = Program.from_root(child_root)
    return child if child.points <= size_limit else a


def _jitter_literals(root: tuple, rng: np.random.Generator,
                     probability: float, sigma: float) -> tuple:
    out = []
    for atom in root:
        t = type(atom)
        if t is tuple:
            out.append(_jitter_literals(atom, rng, probability, sigma))
        elif t is float and rng.random() < probability:
            out.append(float(atom + rng.normal(0.0, sigma)))
        elif t is int and rng.random() < probability:
            out.append(int(atom + round(rng.normal(0.0, sigma))))
        else:
            out.append(atom)
    return tuple(out)


def mutate(a: Program, rng: np.random.Generator, size_limit: int = 100,
           registry=None) -> Program:
    """Gaussian-jitter ERC literals (probability 0.1 each, sigma = 10% of
    the ERC range), then replace one uniform-random non-root point with a
    fresh random subtree sized to respect the limit."""
    sigma = 0.1 * (ERC_FLOAT_HI - ERC_FLOAT_LO)
    root = _jitter_literals(a.root, rng, 0.1, sigma)
    program = Program.from_root(root)
    if program.points < 2:
        return random_program(size_limit, rng, registry=registry)
    target = int(rng.integers(1, program.points))
    removed = subtree_at(program.root, target)
    removed_points = count_points(removed) if type(removed) is tuple else 1
    allowance = max(1, size_limit - (program.points - removed_points))
    replacement = random_subtree(allowance, rng, registry=registry)
    return Program.from_root(replace_subtree(program.root, target, replacement))


def _eval_one(args):
    program, functions, eval_cfg, seed, generation = args
    cases = []
    for f_idx, fn in enumerate(functions):
        ss = np.random.SeedSequence(
            entropy=seed, spawn_key=(_KEY_EVAL, generation, f_idx))
        cases.append(fitness(program, fn, eval_cfg, seed=ss).mean_best_error)
    return tuple(cases)


def evaluate_population(population: List[Individual], cfg: EvolutionConfig,
                        generation: int) -> None:
    """Fill in fitness cases (one per training function) for everyone.

    Every individual in a generation is scored on the same freshly drawn
    episode streams (common random numbers): the seeds depend only on
    (master seed, generation, function), which keeps within-generation
    comparisons fair under noisy fitness and makes results identical for
    any evaluation order or process pool."""
    jobs = [(ind.program, cfg.functions, cfg.evaluation, cfg.seed,
             generation) for ind in population]
    if cfg.threads > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(_eval_one, jobs, chunksize=4))
    else:
        results = [_eval_one(job) for job in jobs]
    for ind, cases in zip(population, results):
        ind.fitness_cases = cases
        ind.scalar_fitness = sum(cases) / len(cases)


def _stats_for(population: Sequence[Individual], generation: int) -> GenerationStats:
    best = min(population, key=lambda ind: ind.scalar_fitness)
    return GenerationStats(
        generation=generation,
        best_fitness=best.scalar_fitness,
        median_fitness=statistics.median(ind.scalar_fitness for ind in population),
        mean_points=sum(ind.program.points for ind in population) / len(population),
        best_program=format_program(best.program),
    )


def evolve(cfg: EvolutionConfig,
           on_generation: Optional[Callable[[GenerationStats], None]] = None
           ) -> Tuple[Individual, List[GenerationStats]]:
    """Run the generational loop and return (best-ever individual, stats).

    One elite (the current generation's best) is copied unchanged into the
    next generation.  ``on_generation`` fires after each generation's
    evaluation, letting callers stream stats to disk.
    """
    init_rng = np.random.default_rng(
        np.random.SeedSequence(entropy=cfg.seed, spawn_key=(_KEY_INIT,)))
    population = initialize(cfg, init_rng)

    best_ever: Optional[Individual] = None
    history: List[GenerationStats] = []

    for generation in range(cfg.generations + 1):
        evaluate_population(population, cfg, generation)
        stats = _stats_for(population, generation)
        gen_best = min(population, key=lambda ind: ind.scalar_fitness)
        if best_ever is None or gen_best.scalar_fitness < best_ever.scalar_fitness:
            best_ever = Individual(gen_best.program, gen_best.fitness_cases,
                                   gen_best.scalar_fitness)
        history.append(stats)
        if on_generation is not None:
            on_generation(stats)
        if generation == cfg.generations:
            break

        var_rng = np.random.default_rng(
            np.random.SeedSequence(entropy=cfg.seed,
                                   spawn_key=(_KEY_VARIATION, generation)))
        next_population = [Individual(gen_best.program)]
        while len(next_population) < cfg.population_size:
            r = var_rng.random()
            if r < cfg.crossover_rate:
                pa = _select(population, cfg, var_rng)
                pb = _select(population, cfg, var_rng)
                child = crossover(pa.program, pb.program, var_rng,
                                  cfg.program_size_limit)
            elif r < cfg.crossover_rate + cfg.mutation_rate:
                child = mutate(_select(population, cfg, var_rng).program,
                               var_rng, cfg.program_size_limit)
            else:
                child = _select(population, cfg, var_rng).program
            next_population.append(Individual(child))
        population = next_population

    return best_ever, history
