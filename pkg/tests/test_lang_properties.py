"""Property suites for the scoring language.

These run a few hundred cases with hypothesis-chosen seeds for fast
feedback; the acceptance module re-runs purity, round-trip and mutation
closure at the full 10,000-case size.
"""
from __future__ import annotations

import copy
import random
import struct

from hypothesis import given, settings, strategies as st

from evoscore.lang import (
    EvalContext, EvalError, LangError, MutationOp, MUTATION_KINDS,
    NoApplicableSite, evaluate, mutate, parse,
)
from evoscore.lang.parser import parse_source

from generators import random_context, random_program_source


def fingerprint(value):
    """Deep, bit-exact shape of a language value (floats via their bits)."""
    t = type(value)
    if t is float:
        return ("real", struct.pack(">d", value))
    if t is bool:
        return ("bool", value)
    if t is int:
        return ("int", value)
    if value is None:
        return ("none",)
    if t is str:
        return ("text", value)
    if t in (list, tuple):
        return ("seq", t.__name__, tuple(fingerprint(v) for v in value))
    if t is dict:
        return ("map", tuple(sorted((fingerprint(k), fingerprint(v))
                                    for k, v in value.items())))
    return ("record", t.__name__, repr(value))


def eval_outcome(program, ctx):
    try:
        return ("value", fingerprint(evaluate(program, ctx)))
    except EvalError as err:
        return ("error", err.kind, err.line, err.col)


def check_purity(seed: int) -> None:
    program = parse(random_program_source(seed))
    bindings = random_context(random.Random(seed ^ 0x5EED))
    snapshot = copy.deepcopy(bindings)
    ctx = EvalContext(bindings)
    first = eval_outcome(program, ctx)
    second = eval_outcome(program, ctx)
    assert first == second
    assert fingerprint(bindings) == fingerprint(snapshot)


def check_roundtrip(seed: int) -> None:
    program = parse(random_program_source(seed))
    assert parse_source(program.source) == program.ast
    assert parse(program.source).id == program.id


def check_mutation_closure(seed: int) -> None:
    rng = random.Random(seed)
    program = parse(random_program_source(seed))
    op = MutationOp(MUTATION_KINDS[rng.randrange(len(MUTATION_KINDS))],
                    rng.getrandbits(32))
    try:
        out = mutate(program, [program], op)
    except NoApplicableSite:
        return
    reparsed = parse(out.source)
    assert reparsed.ast == out.ast


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_purity_random_programs(seed):
    check_purity(seed)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_roundtrip_random_programs(seed):
    check_roundtrip(seed)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_mutation_closure_random_programs(seed):
    check_mutation_closure(seed)


def check_backend_equivalence(seed: int) -> None:
    """The transpiled and closure evaluators must agree bit-for-bit on the
    result (or error kind and span) and on the steps consumed."""
    from evoscore.lang.interp import get_compiled
    program = parse(random_program_source(seed))
    bindings = random_context(random.Random(seed ^ 0xFA57))
    outcomes = []
    for backend in ("fast", "closure"):
        compiled = get_compiled(program, backend)
        try:
            value, steps = compiled.invoke(bindings, 100_000, 50_000)
            outcomes.append(("value", fingerprint(value), steps))
        except EvalError as err:
            outcomes.append(("error", err.kind, err.line, err.col))
    assert outcomes[0] == outcomes[1], program.source


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_backends_agree(seed):
    check_backend_equivalence(seed)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_random_programs_never_crash_the_host(seed):
    program = parse(random_program_source(seed))
    ctx = EvalContext(random_context(random.Random(seed + 1)),
                      step_budget=20_000, value_budget=5_000)
    try:
        evaluate(program, ctx)
    except LangError:
        pass  # recoverable signal, never a crash


def test_unbounded_iteration_is_unrepresentable():
    # the grammar has no while/recursion; a loop must consume a finite value
    from evoscore.lang import ParseError
    import pytest
    with pytest.raises(ParseError):
        parse("fn score(x) { while true { let x = 1; } return x; }")
