"""Island-model evolutionary controller over scoring programs.

The controller keeps several independent populations (islands), repeatedly
selects the k best programs of a random island (ordered worst to best),
asks a mutation provider for a child, measures the child in the sandbox
and admits it back to the same island.  Periodically the weaker half of
the islands is wiped and reseeded from a surviving island's best member so
the search can escape local optima.  Fitness over several instances is the
sum of per-instance scores; any rejection rejects the whole candidate.

With the builtin provider, a fixed seed and workers=1 the whole run is
bit-reproducible; with more workers results may arrive out of order but
admission stays serialized in the controller thread.
"""
from __future__ import annotations

import random
import time
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass, field

from .lang import LangError, ScoringProgram, parse
from .sandbox import Budget, run_candidate


class InvalidSeedProgramError(ValueError):
    pass


@dataclass(frozen=True)
class Candidate:
    program: ScoringProgram
    fitness: int
    # successful mutations between the seed program and this one
    chain_length: int
    born_at: int  # evaluation counter at admission


@dataclass
class Island:
    id: int
    capacity: int
    members: list[Candidate] = field(default_factory=list)
    best: Candidate | None = None


@dataclass(frozen=True)
class StopCondition:
    max_evaluations: int | None = None  # mutant evaluations after the seed
    max_wall_clock: float | None = None
    target_fitness: int | None = None


@dataclass(frozen=True)
class EvolutionConfig:
    n_islands: int = 10
    island_capacity: int = 64
    best_shot_k: int = 2
    reset_period_evals: int = 4000
    reset_fraction: float = 0.5
    rng_seed: int = 0
    stop: StopCondition = StopCondition()
    workers: int = 1

    def __post_init__(self):
        if self.n_islands < 1:
            raise ValueError("need at least one island")
        if not 1 <= self.best_shot_k <= self.island_capacity:
            raise ValueError("best_shot_k must be in [1, island_capacity]")
        if not 0.0 < self.reset_fraction < 1.0:
            raise ValueError("reset_fraction must be in (0, 1)")
        if self.reset_period_evals < 1 or self.workers < 1:
            raise ValueError("reset period and workers must be >= 1")


@dataclass
class EvolutionResult:
    best_candidate: Candidate
    history: list[tuple[int, int]]  # (eval_counter, best_fitness_so_far)
    islands: list[Island]  # final population state, mostly for inspection


def _better(a: Candidate, b: Candidate) -> bool:
    """True when a beats b (higher fitness; earlier birth wins ties)."""
    if a.fitness != b.fitness:
        return a.fitness > b.fitness
    return a.born_at < b.born_at


def select_parents(island: Island, k: int, rng: random.Random | None = None
                   ) -> list[ScoringProgram]:
    """The min(k, |members|) best programs, ordered worst first, best last.

    Ties select and order by earlier birth; rng is accepted for interface
    stability but the rule is deterministic.
    """
    if not island.members:
        raise ValueError("island is empty")
    chosen = sorted(island.members, key=lambda c: (-c.fitness, c.born_at))[:k]
    chosen.sort(key=lambda c: (c.fitness, c.born_at))
    return [c.program for c in chosen]


def admit(island: Island, candidate: Candidate) -> Island:
    """Append a scored candidate; evict the worst (oldest on ties) when the
    island is over capacity; keep the best pointer current."""
    island.members.append(candidate)
    if len(island.members) > island.capacity:
        worst_idx = 0
        for i, c in enumerate(island.members):
            w = island.members[worst_idx]
            if c.fitness < w.fitness or (c.fitness == w.fitness and c.born_at < w.born_at):
                worst_idx = i
        island.members.pop(worst_idx)
    best = island.members[0]
    for c in island.members[1:]:
        if _better(c, best):
            best = c
    island.best = best
    return island


def reset_islands(islands: list[Island], cfg: EvolutionConfig,
                  rng: random.Random) -> list[Island]:
    """Wipe the floor(reset_fraction * n) islands with the lowest best
    fitness (lowest ids on ties) and reseed each with one clone of a
    surviving island's best, chosen uniformly per reset island."""
    n_reset = int(cfg.reset_fraction * len(islands))
    if n_reset == 0:
        return islands
    ranked = sorted(islands, key=lambda isl: (
        isl.best.fitness if isl.best else float("-inf"), isl.id))
    victims = ranked[:n_reset]
    survivors = ranked[n_reset:]
    for island in victims:
        donor = survivors[rng.randrange(len(survivors))]
        clone = donor.best
        island.members = [clone]
        island.best = clone
    return islands


def _instances_list(instances) -> list:
    return list(instances) if isinstance(instances, (list, tuple)) else [instances]


def _measure(problem, instances, program: ScoringProgram, budget: Budget):
    """Sum of per-instance scores, or (None, reason) on any rejection."""
    total = 0
    steps = 0
    for instance in instances:
        report = run_candidate(problem, instance, program, budget)
        steps += report.steps_used
        if not report.is_score():
            return None, f"{report.instance_id}: {report.reason or report.outcome}", steps
        total += report.score
    return total, None, steps


def evolve(problem, instances, seed_program: ScoringProgram,
           cfg: EvolutionConfig, provider, budget: Budget) -> EvolutionResult:
    """Run the evolutionary search and return the best candidate ever seen
    plus the append-only (eval_counter, best_fitness) history.

    The seed program must score on every instance; its evaluation is
    history row 0 and stop.max_evaluations counts the mutant evaluations
    after it.
    """
    instances = _instances_list(instances)
    if not instances:
        raise ValueError("need at least one instance")
    rng = random.Random(cfg.rng_seed)
    started = time.monotonic()

    seed_fitness, reason, _ = _measure(problem, instances, seed_program, budget)
    if seed_fitness is None:
        raise InvalidSeedProgramError(f"seed program rejected: {reason}")
    seed_candidate = Candidate(seed_program, seed_fitness, 0, 0)
    islands = [Island(i, cfg.island_capacity, [seed_candidate], seed_candidate)
               for i in range(cfg.n_islands)]
    best = seed_candidate
    history: list[tuple[int, int]] = [(0, best.fitness)]
    evals_done = 0

    def stopped() -> bool:
        stop = cfg.stop
        if stop.max_evaluations is not None and evals_done >= stop.max_evaluations:
            return True
        if stop.max_wall_clock is not None and time.monotonic() - started >= stop.max_wall_clock:
            return True
        if stop.target_fitness is not None and best.fitness >= stop.target_fitness:
            return True
        return False

    def make_job():
        island = islands[rng.randrange(len(islands))]
        parents = select_parents(island, cfg.best_shot_k, rng)
        parent_chain = max(
            (c.chain_length for c in island.members
             if c.program.id == parents[-1].id), default=0)
        sources = provider.propose(problem.describe_backbone,
                                   [p.source for p in parents], n=1)
        return island.id, parent_chain, sources[0]

    def run_job(job):
        island_id, parent_chain, source = job
        try:
            program = parse(source)
        except LangError as exc:
            return island_id, parent_chain, None, None, f"parse: {exc}"
        fitness, reason, _ = _measure(problem, instances, program, budget)
        return island_id, parent_chain, program, fitness, reason

    def absorb(result):
        nonlocal best, evals_done
        island_id, parent_chain, program, fitness, _reason = result
        evals_done += 1
        if fitness is not None:
            candidate = Candidate(program, fitness, parent_chain + 1, evals_done)
            admit(islands[island_id], candidate)
            if _better(candidate, best):
                best = candidate
        history.append((evals_done, best.fitness))
        if evals_done % cfg.reset_period_evals == 0:
            reset_islands(islands, cfg, rng)

    if cfg.workers == 1:
        while not stopped():
            absorb(run_job(make_job()))
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            pending = set()
            while True:
                while len(pending) < cfg.workers and not stopped():
                    pending.add(pool.submit(run_job, make_job()))
                if not pending:
                    break
                done, pending = wait(pending, return_when=FIRST_COMPLETED)
                for future in done:
                    absorb(future.result())
    return EvolutionResult(best, history, islands)


def history_to_csv(history: list[tuple[int, int]]) -> str:
    lines = ["eval_counter,best_fitness"]
    lines.extend(f"{counter},{fitness}" for counter, fitness in history)
    return "\n".join(lines) + "\n"


def history_from_csv(text: str) -> list[tuple[int, int]]:
    lines = [ln for ln in text.strip().split("\n") if ln]
    if not lines or lines[0] != "eval_counter,best_fitness":
        raise ValueError("missing history header")
    out = []
    for ln in lines[1:]:
        counter, fitness = ln.split(",")
        out.append((int(counter), int(fitness)))
    return out
