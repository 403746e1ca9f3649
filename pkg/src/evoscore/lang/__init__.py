"""Sandboxed expression language for evolvable scoring functions."""

from .errors import EvalError, LangError, ParseError
from .interp import (
    DEFAULT_STEP_BUDGET, DEFAULT_VALUE_BUDGET, EvalContext, evaluate,
    get_compiled, values_equal,
)
from .mutate import (
    MUTATION_KINDS, MutationError, MutationOp, NoApplicableSite, mutate,
    random_expr,
)
from .program import ScoringProgram, parse, render

__all__ = [
    "DEFAULT_STEP_BUDGET",
    "DEFAULT_VALUE_BUDGET",
    "EvalContext",
    "EvalError",
    "LangError",
    "MUTATION_KINDS",
    "MutationError",
    "MutationOp",
    "NoApplicableSite",
    "ParseError",
    "ScoringProgram",
    "evaluate",
    "get_compiled",
    "mutate",
    "parse",
    "random_expr",
    "render",
    "values_equal",
]
