"""Command-line front end.

Subcommands: eval (one candidate on one instance), evolve (a search
campaign from a JSON run config), rank (fitness -> leaderboard position),
report (history + leaderboard -> plot-ready CSV), gen-ahc (instance
generation) and ci (bootstrap confidence interval).  Failures print one
machine-readable JSON object and exit nonzero.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import evolution
from .evolution import EvolutionConfig, StopCondition, evolve, history_from_csv
from .lang import parse
from .leaderboard import load_leaderboard, rank_of
from .problems import fishing_ahc039, registry_lookup
from .providers import BuiltinGPProvider, RemoteLLMProvider
from .sandbox import Budget, run_candidate

CONTEST_CAMPAIGN_SECONDS = 7200.0
DEFAULT_TOKEN_ENV = "EVOSCORE_LLM_TOKEN"


class CliError(Exception):
    pass


def _budget_from_args(args) -> Budget:
    return Budget(
        wall_clock_seconds=args.wall_clock,
        memory_bytes=args.memory_bytes,
        scorer_step_budget=args.step_budget,
        scorer_value_budget=args.value_budget,
    )


def _add_budget_flags(sub):
    sub.add_argument("--wall-clock", type=float, default=1800.0,
                     help="per-candidate wall clock limit in seconds")
    sub.add_argument("--memory-bytes", type=int, default=10 * 2 ** 30)
    sub.add_argument("--step-budget", type=int, default=10_000_000,
                     help="interpreter steps per scorer invocation")
    sub.add_argument("--value-budget", type=int, default=1_000_000)


def _load_program(path: str):
    return parse(Path(path).read_text("utf-8"))


def _load_instance(problem, path: str):
    data = Path(path).read_bytes()
    return problem.parse(data, Path(path).stem)


def cmd_eval(args) -> int:
    problem = registry_lookup(args.problem)
    instance = _load_instance(problem, args.instance)
    program = _load_program(args.program)
    report = run_candidate(problem, instance, program, _budget_from_args(args))
    print(report.to_json_line())
    return 0 if report.is_score() else 1


def _provider_from_config(raw: dict, rng_seed: int):
    kind = raw.get("kind", "builtin-gp")
    if kind == "builtin-gp":
        return BuiltinGPProvider(rng_seed=rng_seed)
    if kind == "remote-llm":
        endpoint = raw.get("endpoint")
        if not endpoint:
            raise CliError("remote-llm provider needs an 'endpoint'")
        token_env = raw.get("auth_token_env", DEFAULT_TOKEN_ENV)
        return RemoteLLMProvider(endpoint=endpoint,
                                 auth_token=os.environ.get(token_env),
                                 timeout_seconds=float(raw.get("timeout_seconds", 60.0)))
    raise CliError(f"unknown provider kind {kind!r}")


def load_run_config(path: str) -> dict:
    raw = json.loads(Path(path).read_text("utf-8"))
    for key in ("problem", "instances", "seed_program", "output_dir"):
        if key not in raw:
            raise CliError(f"run config is missing {key!r}")
    missing = [p for p in raw["instances"] + [raw["seed_program"]]
               if not Path(p).exists()]
    if missing:
        raise CliError(f"referenced paths do not exist: {missing}")
    return raw


def cmd_evolve(args) -> int:
    raw = load_run_config(args.config)
    problem = registry_lookup(raw["problem"])
    instances = [_load_instance(problem, p) for p in raw["instances"]]
    seed_program = _load_program(raw["seed_program"])

    evo = raw.get("evolution", {})
    stop_raw = evo.get("stop", {})
    stop = StopCondition(
        max_evaluations=stop_raw.get("max_evaluations"),
        max_wall_clock=(CONTEST_CAMPAIGN_SECONDS if args.contest_mode
                        else stop_raw.get("max_wall_clock")),
        target_fitness=stop_raw.get("target_fitness"),
    )
    if stop.max_evaluations is None and stop.max_wall_clock is None \
            and stop.target_fitness is None:
        raise CliError("config sets no stop condition (would run forever)")
    cfg = EvolutionConfig(
        n_islands=evo.get("n_islands", 10),
        island_capacity=evo.get("island_capacity", 64),
        best_shot_k=evo.get("best_shot_k", 2),
        reset_period_evals=evo.get("reset_period_evals", 4000),
        reset_fraction=evo.get("reset_fraction", 0.5),
        rng_seed=evo.get("rng_seed", 0),
        stop=stop,
        workers=evo.get("workers", 1),
    )
    budget_raw = raw.get("budget", {})
    budget = Budget(
        wall_clock_seconds=budget_raw.get("wall_clock_seconds", 1800.0),
        memory_bytes=budget_raw.get("memory_bytes", 10 * 2 ** 30),
        scorer_step_budget=budget_raw.get("scorer_step_budget", 10_000_000),
        scorer_value_budget=budget_raw.get("scorer_value_budget", 1_000_000),
    )
    provider = _provider_from_config(raw.get("provider", {}), cfg.rng_seed)

    started = time.monotonic()
    result = evolve(problem, instances, seed_program, cfg, provider, budget)
    wall = time.monotonic() - started

    out_dir = Path(raw["output_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "history.csv").write_text(
        evolution.history_to_csv(result.history), "utf-8")
    (out_dir / "best_program.score").write_text(
        result.best_candidate.program.source, "utf-8")
    summary = {
        "best_fitness": result.best_candidate.fitness,
        "best_program_id": result.best_candidate.program.id,
        "chain_length": result.best_candidate.chain_length,
        "evaluations": result.history[-1][0],
        "wall_clock_seconds": wall,
    }
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2), "utf-8")
    print(json.dumps(summary))
    return 0


def cmd_rank(args) -> int:
    board = load_leaderboard(Path(args.leaderboard).read_text("utf-8"),
                             Path(args.leaderboard).stem)
    rank, percentile, normalized = rank_of(board, args.fitness)
    print(json.dumps({"rank": rank, "percentile": percentile,
                      "normalized": normalized}))
    return 0


def cmd_report(args) -> int:
    board = load_leaderboard(Path(args.leaderboard).read_text("utf-8"),
                             Path(args.leaderboard).stem)
    history = history_from_csv(Path(args.history).read_text("utf-8"))
    lines = ["eval_counter,best_fitness,rank,normalized"]
    for counter, fitness in history:
        rank, _, normalized = rank_of(board, fitness)
        lines.append(f"{counter},{fitness},{rank},{normalized}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, "utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_gen_ahc(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    params = fishing_ahc039.GenParams(n_points=args.points)
    written = []
    for k in range(args.count):
        seed = args.seed + k
        text = fishing_ahc039.generate_instance_text(seed, params)
        path = out_dir / f"instance_{seed:05d}.txt"
        path.write_text(text, "utf-8")
        written.append(str(path))
    print(json.dumps({"written": written}))
    return 0


def cmd_ci(args) -> int:
    total, halfwidth = fishing_ahc039.bootstrap_ci(args.mean, args.std)
    print(json.dumps({"total_mean": total, "total_halfwidth": halfwidth}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evoscore",
        description="Evaluate and evolve scoring heuristics for greedy contest solvers.")
    subs = parser.add_subparsers(dest="command", required=True)

    p_eval = subs.add_parser("eval", help="score one program on one instance")
    p_eval.add_argument("--problem", required=True)
    p_eval.add_argument("--instance", required=True)
    p_eval.add_argument("--program", required=True)
    _add_budget_flags(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_evolve = subs.add_parser("evolve", help="run a search campaign")
    p_evolve.add_argument("--config", required=True, help="JSON run config")
    p_evolve.add_argument("--contest-mode", action="store_true",
                          help="cap the whole campaign at 7200 s wall clock")
    p_evolve.set_defaults(func=cmd_evolve)

    p_rank = subs.add_parser("rank", help="place a fitness on a leaderboard")
    p_rank.add_argument("--leaderboard", required=True)
    p_rank.add_argument("--fitness", type=int, required=True)
    p_rank.set_defaults(func=cmd_rank)

    p_report = subs.add_parser("report", help="history + leaderboard -> CSV")
    p_report.add_argument("--history", required=True)
    p_report.add_argument("--leaderboard", required=True)
    p_report.add_argument("--out")
    p_report.set_defaults(func=cmd_report)

    p_gen = subs.add_parser("gen-ahc", help="generate capture-task instances")
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--count", type=int, default=1)
    p_gen.add_argument("--points", type=int, default=5000)
    p_gen.set_defaults(func=cmd_gen_ahc)

    p_ci = subs.add_parser("ci", help="bootstrap confidence interval")
    p_ci.add_argument("--mean", type=float, required=True)
    p_ci.add_argument("--std", type=float, required=True)
    p_ci.set_defaults(func=cmd_ci)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(json.dumps({"error": {"type": type(exc).__name__,
                                    "message": str(exc)}}))
        return 1


if __name__ == "__main__":
    sys.exit(main())
