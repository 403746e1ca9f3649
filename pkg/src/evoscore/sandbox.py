"""Isolated, budgeted execution of one candidate's fitness evaluation.

``run_candidate`` runs backbone + scorer + evaluator for a single
(program, instance) pair and always returns a FitnessReport; scorer
failures, budget blows, timeouts and memory pressure become outcome
variants instead of exceptions, so a misbehaving candidate can never take
the search down with it.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass

from .lang.errors import LangError
from .limits import (
    CandidateRejected, RunLimits, SandboxOverMemory, SandboxTimeout,
)

OUTCOME_SCORE = "score"
OUTCOME_REJECTED = "rejected"
OUTCOME_TIMEOUT = "timeout"
OUTCOME_OVER_MEMORY = "over_memory"


@dataclass(frozen=True)
class Budget:
    """Per-candidate limits; the defaults are the full contest profile."""

    wall_clock_seconds: float = 1800.0
    memory_bytes: int = 10 * 2 ** 30
    scorer_step_budget: int = 10_000_000
    scorer_value_budget: int = 1_000_000

    def __post_init__(self):
        if (self.wall_clock_seconds <= 0 or self.memory_bytes <= 0
                or self.scorer_step_budget <= 0 or self.scorer_value_budget <= 0):
            raise ValueError("all budget limits must be strictly positive")

    def make_limits(self) -> RunLimits:
        return RunLimits(wall_clock_seconds=self.wall_clock_seconds,
                         memory_bytes=self.memory_bytes,
                         step_budget=self.scorer_step_budget,
                         value_budget=self.scorer_value_budget)


@dataclass(frozen=True)
class FitnessReport:
    program_id: str
    instance_id: str
    outcome: str  # one of the OUTCOME_* kinds
    score: int | None
    reason: str | None
    elapsed_seconds: float
    steps_used: int

    def is_score(self) -> bool:
        return self.outcome == OUTCOME_SCORE

    def to_json_line(self) -> str:
        return json.dumps({
            "program_id": self.program_id,
            "instance_id": self.instance_id,
            "outcome": self.outcome,
            "score": self.score,
            "reason": self.reason,
            "elapsed_seconds": self.elapsed_seconds,
            "steps_used": self.steps_used,
        })

    @staticmethod
    def from_json_line(line: str) -> "FitnessReport":
        raw = json.loads(line)
        return FitnessReport(
            program_id=raw["program_id"],
            instance_id=raw["instance_id"],
            outcome=raw["outcome"],
            score=raw["score"],
            reason=raw["reason"],
            elapsed_seconds=float(raw["elapsed_seconds"]),
            steps_used=int(raw["steps_used"]),
        )


def run_candidate(problem, instance, program, budget: Budget) -> FitnessReport:
    """Evaluate one candidate on one instance under the given budget.

    Deterministic for score/rejected outcomes; timeout and over_memory
    depend on machine load.  Never raises for candidate-side failures.
    """
    limits = budget.make_limits()
    instance_id = getattr(instance, "instance_id", "<instance>")
    started = time.monotonic()

    def report(outcome, score=None, reason=None):
        return FitnessReport(
            program_id=program.id,
            instance_id=instance_id,
            outcome=outcome,
            score=score,
            reason=reason,
            elapsed_seconds=time.monotonic() - started,
            steps_used=limits.steps_used,
        )

    try:
        solution = problem.run_backbone(instance, program, limits)
        score = problem.evaluate(instance, solution)
    except LangError as exc:
        return report(OUTCOME_REJECTED, reason=str(exc))
    except CandidateRejected as exc:
        return report(OUTCOME_REJECTED, reason=exc.reason)
    except SandboxTimeout:
        return report(OUTCOME_TIMEOUT, reason="wall-clock limit exceeded")
    except (SandboxOverMemory, MemoryError):
        return report(OUTCOME_OVER_MEMORY, reason="memory limit exceeded")
    except Exception as exc:  # backbone bug or hostile value: contain it
        return report(OUTCOME_REJECTED,
                      reason=f"internal-error: {type(exc).__name__}: {exc}")
    if type(score) is not int:
        return report(OUTCOME_REJECTED,
                      reason=f"evaluator returned {type(score).__name__}, expected int")
    return report(OUTCOME_SCORE, score=score)
