"""evoscore: evolutionary search over scoring heuristics for greedy
contest solvers.

The pieces: a sandboxed expression language for the evolvable scoring
functions (`evoscore.lang`), per-contest greedy backbones and exact
evaluators (`evoscore.problems`), a budgeted execution sandbox
(`evoscore.sandbox`), the island-model search loop (`evoscore.evolution`),
and a CLI (`evoscore.cli`).
"""

__version__ = "0.1.0"

from .lang import EvalContext, MutationOp, ScoringProgram, evaluate, mutate, parse, render
from .sandbox import Budget, FitnessReport, run_candidate

__all__ = [
    "Budget",
    "EvalContext",
    "FitnessReport",
    "MutationOp",
    "ScoringProgram",
    "evaluate",
    "mutate",
    "parse",
    "render",
    "run_candidate",
    "__version__",
]
