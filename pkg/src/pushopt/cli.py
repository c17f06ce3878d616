"""Command-line entry point.

Subcommands: ``evolve``, ``eval``, ``trace``, ``generalise``, ``sweep`` and
``bench``.  Configuration precedence is built-in defaults, then a JSON
config file (``--config``), then explicit command-line flags.  Every output
artifact embeds the resolved configuration and seed, and the manifest
written by ``evolve`` can be fed back via ``--config`` to reproduce a run
byte for byte.

Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Dict, List, Optional, Tuple

from .analysis import (DEFAULT_SWEEP_DIMS, REEVAL_REPEATS, dimensionality_sweep,
                       generality_matrix, matrix_csv, matrix_text, sweep_csv)
from .benchmarks import FUNCTION_IDS, make_function, shift_file_name
from .evaluator import (EvaluationConfig, fitness, random_search_mean, trace)
from .evolution import EvolutionConfig, evolve
from .program import Program, PushParseError, format_program, parse

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3

DEFAULTS: Dict[str, object] = {
    "function": "F1",
    "dim": 10,
    "moves": 1000,
    "repeats": 10,
    "seed": 0,
    "population": 200,
    "generations": 50,
    "tournament": 5,
    "selection": "tournament",
    "size_limit": 100,
    "exec_budget": 100,
    "shift_dir": None,
    "generated_shifts": False,
    "out": ".",
    "threads": 1,
    "dims": ",".join(str(d) for d in DEFAULT_SWEEP_DIMS),
}


class ConfigError(ValueError):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pushopt",
        description="Evolve and analyse Push-program local optimisers")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file (or run manifest)")
        p.add_argument("--function", help="comma-separated function ids, e.g. F1,F9")
        p.add_argument("--dim", type=int, help="search dimension")
        p.add_argument("--moves", type=int, help="moves per episode")
        p.add_argument("--repeats", type=int, help="episodes per fitness evaluation")
        p.add_argument("--seed", type=int, help="master RNG seed")
        p.add_argument("--exec-budget", type=int, dest="exec_budget",
                       help="instruction executions per move")
        p.add_argument("--shift-dir", dest="shift_dir",
                       help="directory holding <id>_shift_D<dim>.txt files")
        p.add_argument("--generated-shifts", action="store_true", default=None,
                       dest="generated_shifts",
                       help="use the seeded fallback shift generator")
        p.add_argument("--out", help="output directory")
        p.add_argument("--threads", type=int, help="evaluation parallelism")

    p_evolve = sub.add_parser("evolve", help="run a GP optimiser-evolution run")
    common(p_evolve)
    p_evolve.add_argument("--population", type=int)
    p_evolve.add_argument("--generations", type=int)
    p_evolve.add_argument("--tournament", type=int)
    p_evolve.add_argument("--selection", choices=("tournament", "lexicase"))
    p_evolve.add_argument("--size-limit", type=int, dest="size_limit")

    p_eval = sub.add_parser("eval", help="score a program file")
    common(p_eval)
    p_eval.add_argument("program_file")

    p_trace = sub.add_parser("trace", help="record one episode trajectory")
    common(p_trace)
    p_trace.add_argument("program_file")

    p_gen = sub.add_parser("generalise", help="programs x functions error matrix")
    common(p_gen)
    p_gen.add_argument("program_files", nargs="+")

    p_sweep = sub.add_parser("sweep", help="error across dimensionalities")
    common(p_sweep)
    p_sweep.add_argument("program_file")
    p_sweep.add_argument("--dims", help="comma-separated dimensions, e.g. 2,10,15,20")

    p_bench = sub.add_parser("bench", help="describe a benchmark and run the "
                                           "uniform-random-search baseline")
    common(p_bench)
    return parser


def _load_config_file(path: str) -> Dict[str, object]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    if "config" in data and isinstance(data["config"], dict):
        data = data["config"]  # run manifest
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return data


def _resolve_config(args: argparse.Namespace) -> Dict[str, object]:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(_load_config_file(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _function_ids(cfg) -> List[str]:
    ids = [f.strip() for f in str(cfg["function"]).split(",") if f.strip()]
    for fid in ids:
        if fid not in FUNCTION_IDS:
            raise ConfigError(
                f"unknown function {fid!r}; choose from {', '.join(FUNCTION_IDS)}")
    if not ids:
        raise ConfigError("no function given")
    return ids


def _shift_source(cfg, function_ids, dim) -> Tuple[str, Optional[str]]:
    if cfg["shift_dir"]:
        shift_dir = str(cfg["shift_dir"])
        for fid in function_ids:
            path = os.path.join(shift_dir, shift_file_name(fid, dim))
            if not os.path.exists(path):
                raise ConfigError(
                    f"missing shift data file {path}; provide it or pass "
                    f"--generated-shifts")
        return "file", shift_dir
    if cfg["generated_shifts"]:
        return "generated", None
    expected = ", ".join(shift_file_name(fid, dim) for fid in function_ids)
    raise ConfigError(
        f"no shift data source: pass --shift-dir containing {expected} "
        f"or --generated-shifts")


def _make_functions(cfg, dim=None):
    ids = _function_ids(cfg)
    dim = int(cfg["dim"]) if dim is None else dim
    mode, shift_dir = _shift_source(cfg, ids, dim)
    return [make_function(fid, dim, shift=mode, shift_dir=shift_dir)
            for fid in ids]


def _evaluation_config(cfg) -> EvaluationConfig:
    return EvaluationConfig(repeats=int(cfg["repeats"]), moves=int(cfg["moves"]),
                            exec_budget=int(cfg["exec_budget"]),
                            seed=int(cfg["seed"]))


def _read_program_file(path: str) -> Program:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = "\n".join(line for line in fh
                             if not line.lstrip().startswith("#"))
    except OSError as exc:
        raise OSError(f"cannot read program file {path}: {exc}") from exc
    return parse(text)


def _config_comment(cfg) -> str:
    return "# config=" + json.dumps(cfg, sort_keys=True)


def _ensure_out(cfg) -> str:
    out = str(cfg["out"])
    os.makedirs(out, exist_ok=True)
    return out


def _cmd_evolve(cfg) -> int:
    out = _ensure_out(cfg)
    functions = _make_functions(cfg)
    evo_cfg = EvolutionConfig(
        functions=tuple(functions),
        evaluation=_evaluation_config(cfg),
        population_size=int(cfg["population"]),
        generations=int(cfg["generations"]),
        tournament_size=int(cfg["tournament"]),
        program_size_limit=int(cfg["size_limit"]),
        selection=str(cfg["selection"]),
        seed=int(cfg["seed"]),
        threads=int(cfg["threads"]),
    )

    manifest = {"subcommand": "evolve", "config": cfg}
    with open(os.path.join(out, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")

    stats_path = os.path.join(out, "generations.csv")
    champions_path = os.path.join(out, "champions_by_generation.txt")
    n_cases = len(functions)
    with open(stats_path, "w", encoding="utf-8", newline="\n") as stats_fh, \
            open(champions_path, "w", encoding="utf-8", newline="\n") as champ_fh:
        stats_fh.write(_config_comment(cfg) + "\n")
        stats_fh.write("generation,best_fitness,median_fitness,mean_points,"
                       "fitness_cases\n")
        champ_fh.write(_config_comment(cfg) + "\n")

        def on_generation(stats):
            stats_fh.write(f"{stats.generation},{stats.best_fitness!r},"
                           f"{stats.median_fitness!r},{stats.mean_points!r},"
                           f"{n_cases}\n")
            stats_fh.flush()
            champ_fh.write(stats.best_program + "\n")
            champ_fh.flush()

        best, history = evolve(evo_cfg, on_generation=on_generation)

    champion_path = os.path.join(out, "champion.push")
    with open(champion_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_config_comment(cfg) + "\n")
        fh.write(f"# seed={cfg['seed']} scalar_fitness={best.scalar_fitness!r} "
                 f"fitness_cases={','.join(repr(c) for c in best.fitness_cases)}\n")
        fh.write(format_program(best.program) + "\n")
    print(f"champion fitness={best.scalar_fitness!r} points={best.program.points}")
    print(f"wrote {champion_path}")
    return EXIT_OK


def _cmd_eval(cfg, program_file: str) -> int:
    program = _read_program_file(program_file)
    functions = _make_functions(cfg)
    eval_cfg = _evaluation_config(cfg)
    for fn in functions:
        result = fitness(program, fn, eval_cfg, seed=int(cfg["seed"]))
        episode_errors = ",".join(repr(e.best_error) for e in result.per_episode)
        print(f"function={fn.id} dim={fn.dimension} "
              f"mean_best_error={result.mean_best_error!r}")
        print(f"episode_best_errors={episode_errors}")
    return EXIT_OK


def _cmd_trace(cfg, program_file: str) -> int:
    out = _ensure_out(cfg)
    program = _read_program_file(program_file)
    functions = _make_functions(cfg)
    eval_cfg = _evaluation_config(cfg)
    for fn in functions:
        path = os.path.join(
            out, f"trace_{fn.id}_D{fn.dimension}_seed{cfg['seed']}.csv")
        result = trace(program, fn, eval_cfg, path, seed=int(cfg["seed"]))
        print(f"wrote {path} best_error={result.best_error!r}")
    return EXIT_OK


def _cmd_generalise(cfg, program_files: List[str]) -> int:
    out = _ensure_out(cfg)
    labelled = []
    for path in program_files:
        label = os.path.splitext(os.path.basename(path))[0]
        labelled.append((label, _read_program_file(path)))
    functions = _make_functions(cfg)
    eval_cfg = EvaluationConfig(repeats=int(cfg["repeats"]), moves=int(cfg["moves"]),
                                exec_budget=int(cfg["exec_budget"]),
                                seed=int(cfg["seed"]))
    matrix = generality_matrix(labelled, functions, eval_cfg, seed=int(cfg["seed"]))
    csv_path = os.path.join(out, "generality.csv")
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_config_comment(cfg) + "\n")
        fh.write(matrix_csv(matrix))
    txt_path = os.path.join(out, "generality.txt")
    with open(txt_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(matrix_text(matrix))
    print(f"wrote {csv_path}")
    print(matrix_text(matrix), end="")
    return EXIT_OK


def _cmd_sweep(cfg, program_file: str) -> int:
    out = _ensure_out(cfg)
    program = _read_program_file(program_file)
    ids = _function_ids(cfg)
    try:
        dims = [int(d) for d in str(cfg["dims"]).split(",") if d.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --dims value {cfg['dims']!r}") from exc
    if not dims:
        raise ConfigError("empty --dims list")
    mode, shift_dir = _shift_source(cfg, ids, dims[0])
    if mode == "file":
        for fid in ids:
            for d in dims:
                path = os.path.join(shift_dir, shift_file_name(fid, d))
                if not os.path.exists(path):
                    raise ConfigError(f"missing shift data file {path}")
    eval_cfg = _evaluation_config(cfg)
    label = os.path.splitext(os.path.basename(program_file))[0]
    sweeps = [dimensionality_sweep(label, program, fid, dims, eval_cfg,
                                   shift=mode, shift_dir=shift_dir,
                                   seed=int(cfg["seed"]))
              for fid in ids]
    csv_path = os.path.join(out, "sweep.csv")
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_config_comment(cfg) + "\n")
        fh.write(sweep_csv(sweeps))
    print(f"wrote {csv_path}")
    for s in sweeps:
        cells = " ".join(f"D{d}={c!r}" for d, c in zip(s.dimensions, s.cells))
        print(f"{s.label} on {s.function_id}: {cells}")
    return EXIT_OK


def _cmd_bench(cfg) -> int:
    functions = _make_functions(cfg)
    eval_cfg = _evaluation_config(cfg)
    for fn in functions:
        shift = ",".join(repr(x) for x in fn.shift)
        print(f"function={fn.id} dim={fn.dimension} lo={fn.bounds_lo[0]!r} "
              f"hi={fn.bounds_hi[0]!r} bias={fn.bias!r}")
        print(f"shift={shift}")
        baseline = random_search_mean(fn, eval_cfg.moves + 1, eval_cfg.repeats,
                                      seed=int(cfg["seed"]))
        print(f"random_search evaluations={eval_cfg.moves + 1} "
              f"repeats={eval_cfg.repeats} seed={cfg['seed']} "
              f"mean_best_error={baseline!r}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        if args.subcommand == "evolve":
            return _cmd_evolve(cfg)
        if args.subcommand == "eval":
            return _cmd_eval(cfg, args.program_file)
        if args.subcommand == "trace":
            return _cmd_trace(cfg, args.program_file)
        if args.subcommand == "generalise":
            return _cmd_generalise(cfg, args.program_files)
        if args.subcommand == "sweep":
            return _cmd_sweep(cfg, args.program_file)
        if args.subcommand == "bench":
            return _cmd_bench(cfg)
        raise ConfigError(f"unknown subcommand {args.subcommand!r}")
    except (ConfigError, PushParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
