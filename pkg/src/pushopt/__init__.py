"""pushopt: a Push interpreter with a vector stack and GP tooling for
evolving local optimisers on continuous benchmark landscapes."""

from .analysis import (DimensionalitySweep, DistributionReport,
                       GeneralityMatrix, dimensionality_sweep,
                       distribution_report, generality_matrix)
from .benchmarks import (FUNCTION_IDS, BenchmarkFunction, ShiftDataError,
                         ShiftDataFile, bounds_for, generated_shift,
                         load_shift_data, make_function, shift_file_name)
from .evaluator import (EpisodeResult, EvaluationConfig, FitnessResult,
                        fitness, random_search_baseline, random_search_mean,
                        run_episode, trace)
from .evolution import (EvolutionConfig, GenerationStats, Individual,
                        crossover, evolve, initialize, lexicase_select,
                        mutate, tournament_select)
from .instructions import InstructionRegistry, default_registry
from .interpreter import (HALT_BUDGET, HALT_EXEC_EMPTY, ExecutionReport,
                          execute, new_state, random_program)
from .program import (Program, PushParseError, UnknownInstructionError,
                      format_program, parse)
from .state import Environment, PushState

__version__ = "0.1.0"
