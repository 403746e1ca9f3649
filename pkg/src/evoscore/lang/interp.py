"""Budgeted evaluation of scoring programs.

This module holds the value/builtin semantics and the reference evaluator
(a tree of Python closures compiled once per program).  ``get_compiled``
defaults to the faster transpiling backend in ``pycompile``, which must
agree with the closure evaluator bit-for-bit; the property suite
cross-checks them.

Two budgets bound every invocation:

* a step budget, charged per executed statement/expression node and by
  collection size inside builtins and loops;
* a value budget, charged for every container cell a program allocates
  (tuple/list literals, ``sorted`` results, ``range``).

Hitting either budget aborts the call with a ``budget-exceeded`` error.
All runtime failures are `EvalError`s carrying the failing source span;
nothing a program does can mutate host bindings, because the language has
no mutating construct.
"""
from __future__ import annotations

import dataclasses
import math

from .errors import EvalError
from .nodes import (
    Binary, Block, BoolLit, Call, FieldAccess, For, Function, Ident, If,
    Index, IntLit, Let, ListLit, NoneLit, RealLit, Return, Span, TupleLit,
    Unary, count_nodes,
)

DEFAULT_STEP_BUDGET = 10_000_000
DEFAULT_VALUE_BUDGET = 1_000_000

_INT_MIN = -(2 ** 63)
_INT_MAX = 2 ** 63 - 1


@dataclasses.dataclass(frozen=True)
class EvalContext:
    """Named host bindings plus the per-invocation budgets."""

    bindings: dict
    step_budget: int = DEFAULT_STEP_BUDGET
    value_budget: int = DEFAULT_VALUE_BUDGET

    def __post_init__(self):
        if self.step_budget <= 0 or self.value_budget <= 0:
            raise ValueError("budgets must be positive")


class _State:
    __slots__ = ("steps", "values")

    def __init__(self, steps: int, values: int):
        self.steps = steps
        self.values = values


def _type_name(v) -> str:
    if v is None:
        return "none"
    t = type(v)
    if t is bool:
        return "boolean"
    if t is int:
        return "integer"
    if t is float:
        return "real"
    if t is str:
        return "text"
    if t is tuple:
        return "tuple"
    if t is list:
        return "list"
    if t is dict:
        return "mapping"
    if dataclasses.is_dataclass(v):
        return f"record {t.__name__}"
    return t.__name__


def _err(kind: str, message: str, span: Span) -> EvalError:
    return EvalError(kind, message, span.line, span.col)


def _budget_err(span: Span, what: str) -> EvalError:
    return _err("budget-exceeded", f"{what} budget exhausted", span)


def _charge(st: _State, n: int, span: Span):
    st.steps -= n
    if st.steps < 0:
        raise _budget_err(span, "step")


def _alloc(st: _State, n: int, span: Span):
    st.values -= n
    if st.values < 0:
        raise _budget_err(span, "value")


def _check_int(r: int, span: Span) -> int:
    if _INT_MIN <= r <= _INT_MAX:
        return r
    raise _err("overflow", "integer result exceeds 64 bits", span)


def _is_number(v) -> bool:
    t = type(v)
    return t is int or t is float


# --- structural equality (bool is distinct from int, unlike Python) ---

def values_equal(a, b) -> bool:
    ta, tb = type(a), type(b)
    if ta is bool or tb is bool:
        return ta is tb and a is b
    if (ta is int or ta is float) and (tb is int or tb is float):
        return a == b
    if a is None or b is None:
        return a is None and b is None
    if ta is not tb:
        return False
    if ta is str:
        return a == b
    if ta is tuple or ta is list:
        return len(a) == len(b) and all(values_equal(x, y) for x, y in zip(a, b))
    if ta is dict:
        if len(a) != len(b):
            return False
        for k, v in a.items():
            if k not in b or not values_equal(v, b[k]):
                return False
        return True
    return a == b  # records compare by dataclass equality


def _order_lt(a, b, span: Span) -> bool:
    ta, tb = type(a), type(b)
    if (ta is int or ta is float) and (tb is int or tb is float):
        return a < b
    if ta is str and tb is str:
        return a < b
    if ta in (tuple, list) and tb in (tuple, list):
        for x, y in zip(a, b):
            if _order_lt(x, y, span):
                return True
            if _order_lt(y, x, span):
                return False
        return len(a) < len(b)
    raise _err("type-error",
               f"cannot order {_type_name(a)} and {_type_name(b)}", span)


# --- builtin implementations ---

def _iterable_items(v, span: Span):
    t = type(v)
    if t is list or t is tuple:
        return v
    if t is dict:
        return list(v.keys())
    raise _err("type-error", f"cannot iterate {_type_name(v)}", span)


def _bi_min_max(args, st, span, pick_right):
    if len(args) == 1:
        items = _iterable_items(args[0], span)
        if not items:
            raise _err("domain-error", "min/max of empty collection", span)
        _charge(st, len(items), span)
    else:
        items = args
    best = items[0]
    for v in items[1:]:
        if pick_right(best, v, span):
            best = v
    return best


def _bi_sum(args, st, span):
    items = _iterable_items(args[0], span)
    _charge(st, len(items) + 1, span)
    total: int | float = 0
    for v in items:
        t = type(v)
        if t is int:
            if type(total) is int:
                total = _check_int(total + v, span)
            else:
                total += v
        elif t is float:
            total = total + v
        else:
            raise _err("type-error", f"cannot sum {_type_name(v)}", span)
    return total


def _bi_sorted(args, st, span):
    items = list(_iterable_items(args[0], span))
    _charge(st, 2 * len(items) + 1, span)
    _alloc(st, len(items) + 1, span)
    kinds = set()
    for v in items:
        t = type(v)
        if t is bool or v is None or t is dict or dataclasses.is_dataclass(v):
            raise _err("type-error", f"cannot sort {_type_name(v)}", span)
        kinds.add("num" if t in (int, float) else ("seq" if t in (tuple, list) else "text"))
    if len(kinds) > 1:
        raise _err("type-error", "cannot sort mixed kinds", span)
    try:
        items.sort()
    except TypeError:
        raise _err("type-error", "unorderable elements in sorted()", span) from None
    return items


def _bi_len(args, st, span):
    v = args[0]
    if type(v) in (list, tuple, dict):
        return len(v)
    raise _err("type-error", f"len() of {_type_name(v)}", span)


def _bi_abs(args, st, span):
    v = args[0]
    t = type(v)
    if t is int:
        return _check_int(-v if v < 0 else v, span)
    if t is float:
        return abs(v)
    raise _err("type-error", f"abs() of {_type_name(v)}", span)


def _bi_floor(args, st, span):
    v = args[0]
    t = type(v)
    if t is int:
        return v
    if t is float:
        if v != v or v in (math.inf, -math.inf):
            raise _err("domain-error", "floor() of non-finite real", span)
        return _check_int(math.floor(v), span)
    raise _err("type-error", f"floor() of {_type_name(v)}", span)


def _bi_ln(args, st, span):
    v = args[0]
    if not _is_number(v):
        raise _err("type-error", f"ln() of {_type_name(v)}", span)
    if v <= 0:
        raise _err("domain-error", "ln() of non-positive value", span)
    return math.log(v)


def _bi_range(args, st, span):
    for a in args:
        if type(a) is not int:
            raise _err("type-error", f"range() needs integers, got {_type_name(a)}", span)
    if len(args) == 1:
        start, end = 0, args[0]
    else:
        start, end = args
    n = max(0, end - start)
    _alloc(st, n + 1, span)
    _charge(st, n + 1, span)
    return list(range(start, end))


_BUILTIN_IMPL = {
    "min": lambda args, st, span: _bi_min_max(args, st, span,
                                              lambda best, v, s: _order_lt(v, best, s)),
    "max": lambda args, st, span: _bi_min_max(args, st, span,
                                              lambda best, v, s: _order_lt(best, v, s)),
    "abs": _bi_abs,
    "len": _bi_len,
    "floor": _bi_floor,
    "ln": _bi_ln,
    "sorted": _bi_sorted,
    "sum": _bi_sum,
    "range": _bi_range,
}


# --- expression compilation ---

def _compile_binary(op: str, lc, rc, span: Span):
    if op == "+":
        def run(env, st):
            a = lc(env, st)
            b = rc(env, st)
            ta, tb = type(a), type(b)
            if ta is int and tb is int:
                return _check_int(a + b, span)
            if (ta is int or ta is float) and (tb is int or tb is float):
                return a + b
            raise _err("type-error", f"cannot add {_type_name(a)} and {_type_name(b)}", span)
        return run
    if op == "-":
        def run(env, st):
            a = lc(env, st)
            b = rc(env, st)
            ta, tb = type(a), type(b)
            if ta is int and tb is int:
                return _check_int(a - b, span)
            if (ta is int or ta is float) and (tb is int or tb is float):
                return a - b
            raise _err("type-error", f"cannot subtract {_type_name(b)} from {_type_name(a)}", span)
        return run
    if op == "*":
        def run(env, st):
            a = lc(env, st)
            b = rc(env, st)
            ta, tb = type(a), type(b)
            if ta is int and tb is int:
                return _check_int(a * b, span)
            if (ta is int or ta is float) and (tb is int or tb is float):
                return a * b
            raise _err("type-error", f"cannot multiply {_type_name(a)} and {_type_name(b)}", span)
        return run
    if op == "/":
        def run(env, st):
            a = lc(env, st)
            b = rc(env, st)
            if _is_number(a) and _is_number(b):
                if b == 0:
                    raise _err("division-by-zero", "division by zero", span)
                return a / b
            raise _err("type-error", f"cannot divide {_type_name(a)} by {_type_name(b)}", span)
        return run
    if op == "//":
        def run(env, st):
            a = lc(env, st)
            b = rc(env, st)
            ta, tb = type(a), type(b)
            if ta is int and tb is int:
                if b == 0:
                    raise _err("division-by-zero", "floor division by zero", span)
                return _check_int(a // b, span)
            if (ta is int or ta is float) and (tb is int or tb is float):
                if b == 0:
                    raise _err("division-by-zero", "floor division by zero", span)
                q = a / b
                if q != q or q in (math.inf, -math.inf):
                    raise _err("domain-error", "non-finite floor division", span)
                return _check_int(math.floor(q), span)
            raise _err("type-error", f"cannot floor-divide {_type_name(a)} by {_type_name(b)}", span)
        return run
    if op == "%":
        def run(env, st):
            a = lc(env, st)
            b = rc(env, st)
            ta, tb = type(a), type(b)
            if ta is int and tb is int:
                if b == 0:
                    raise _err("division-by-zero", "modulo by zero", span)
                return a % b
            if (ta is int or ta is float) and (tb is int or tb is float):
                if b == 0:
                    raise _err("division-by-zero", "modulo by zero", span)
                return a % b
            raise _err("type-error", f"cannot take {_type_name(a)} modulo {_type_name(b)}", span)
        return run
    if op in ("<", "<=", ">", ">="):
        def run(env, st, _op=op):
            a = lc(env, st)
            b = rc(env, st)
            if _op == "<":
                return _order_lt(a, b, span)
            if _op == ">":
                return _order_lt(b, a, span)
            if _op == "<=":
                return not _order_lt(b, a, span)
            return not _order_lt(a, b, span)
        return run
    if op == "==":
        def run(env, st):
            return values_equal(lc(env, st), rc(env, st))
        return run
    if op == "!=":
        def run(env, st):
            return not values_equal(lc(env, st), rc(env, st))
        return run
    if op in ("in", "not in"):
        negate = op == "not in"

        def run(env, st):
            a = lc(env, st)
            b = rc(env, st)
            tb = type(b)
            if tb is dict:
                try:
                    found = a in b
                except TypeError:
                    raise _err("type-error", f"{_type_name(a)} is not a valid key", span) from None
            elif tb is list or tb is tuple:
                _charge(st, len(b) + 1, span)
                found = any(values_equal(a, x) for x in b)
            else:
                raise _err("type-error", f"cannot test membership in {_type_name(b)}", span)
            return not found if negate else found
        return run
    if op == "and":
        def run(env, st):
            a = lc(env, st)
            if a is False:
                return False
            if a is not True:
                raise _err("type-error", f"'and' needs booleans, got {_type_name(a)}", span)
            b = rc(env, st)
            if type(b) is not bool:
                raise _err("type-error", f"'and' needs booleans, got {_type_name(b)}", span)
            return b
        return run
    if op == "or":
        def run(env, st):
            a = lc(env, st)
            if a is True:
                return True
            if a is not False:
                raise _err("type-error", f"'or' needs booleans, got {_type_name(a)}", span)
            b = rc(env, st)
            if type(b) is not bool:
                raise _err("type-error", f"'or' needs booleans, got {_type_name(b)}", span)
            return b
        return run
    raise ValueError(f"unknown operator {op!r}")  # pragma: no cover


def _compile_expr(expr):
    t = type(expr)
    span = expr.span
    if t is IntLit or t is RealLit or t is BoolLit:
        v = expr.value

        def run(env, st, _v=v):
            return _v
        return run
    if t is NoneLit:
        def run(env, st):
            return None
        return run
    if t is Ident:
        name = expr.name

        def run(env, st):
            try:
                return env[name]
            except KeyError:
                raise _err("undeclared-identifier",
                           f"name {name!r} is not bound", span) from None
        return run
    if t is FieldAccess:
        obj_c = _compile_expr(expr.obj)
        name = expr.name

        def run(env, st):
            o = obj_c(env, st)
            try:
                return getattr(o, name)
            except AttributeError:
                raise _err("bad-field",
                           f"{_type_name(o)} has no field {name!r}", span) from None
        return run
    if t is Index:
        obj_c = _compile_expr(expr.obj)
        idx_c = _compile_expr(expr.index)

        def run(env, st):
            o = obj_c(env, st)
            k = idx_c(env, st)
            to = type(o)
            if to is dict:
                try:
                    return o[k]
                except KeyError:
                    raise _err("missing-key", f"key {k!r} not in mapping", span) from None
                except TypeError:
                    raise _err("type-error", f"{_type_name(k)} is not a valid key", span) from None
            if to is list or to is tuple:
                if type(k) is not int:
                    raise _err("type-error",
                               f"list index must be integer, got {_type_name(k)}", span)
                try:
                    return o[k]
                except IndexError:
                    raise _err("bad-index", f"index {k} out of range", span) from None
            raise _err("type-error", f"cannot index {_type_name(o)}", span)
        return run
    if t is Unary:
        inner = _compile_expr(expr.operand)
        if expr.op == "not":
            def run(env, st):
                v = inner(env, st)
                if type(v) is bool:
                    return not v
                raise _err("type-error", f"'not' needs a boolean, got {_type_name(v)}", span)
            return run

        def run(env, st):
            v = inner(env, st)
            tv = type(v)
            if tv is int:
                return _check_int(-v, span)
            if tv is float:
                return -v
            raise _err("type-error", f"cannot negate {_type_name(v)}", span)
        return run
    if t is Binary:
        return _compile_binary(expr.op, _compile_expr(expr.left),
                               _compile_expr(expr.right), span)
    if t is Call:
        arg_cs = tuple(_compile_expr(a) for a in expr.args)
        impl = _BUILTIN_IMPL[expr.name]

        def run(env, st):
            return impl([c(env, st) for c in arg_cs], st, span)
        return run
    if t is TupleLit or t is ListLit:
        item_cs = tuple(_compile_expr(a) for a in expr.items)
        make = tuple if t is TupleLit else list
        size = len(item_cs) + 1

        def run(env, st):
            _alloc(st, size, span)
            return make(c(env, st) for c in item_cs)
        return run
    raise TypeError(f"not an expression node: {t.__name__}")  # pragma: no cover


# --- statement compilation ---
# Statement closures return None to continue or a 1-tuple (value,) on return.

def _stmt_cost(stmt) -> int:
    t = type(stmt)
    if t is Let or t is Return:
        return 1 + count_nodes(stmt.value)
    if t is If:
        return 1 + count_nodes(stmt.cond)
    if t is For:
        return 1 + count_nodes(stmt.iterable)
    raise TypeError(f"unknown statement {t.__name__}")  # pragma: no cover


def _compile_stmt(stmt):
    t = type(stmt)
    span = stmt.span
    if t is Let:
        value_c = _compile_expr(stmt.value)
        name = stmt.name

        def run(env, st):
            env[name] = value_c(env, st)
            return None
        return run
    if t is Return:
        value_c = _compile_expr(stmt.value)

        def run(env, st):
            return (value_c(env, st),)
        return run
    if t is If:
        cond_c = _compile_expr(stmt.cond)
        then_c = _compile_block(stmt.then)
        else_c = _compile_block(stmt.orelse) if stmt.orelse is not None else None

        def run(env, st):
            c = cond_c(env, st)
            if c is True:
                return then_c(env, st)
            if c is False:
                return else_c(env, st) if else_c is not None else None
            raise _err("type-error",
                       f"if condition must be boolean, got {_type_name(c)}", span)
        return run
    if t is For:
        iter_c = _compile_expr(stmt.iterable)
        body_c = _compile_block(stmt.body)
        var = stmt.var

        def run(env, st):
            seq = _iterable_items(iter_c(env, st), span)
            _charge(st, len(seq) + 1, span)
            for item in seq:
                env[var] = item
                r = body_c(env, st)
                if r is not None:
                    return r
            return None
        return run
    raise TypeError(f"unknown statement {t.__name__}")  # pragma: no cover


def _compile_block(block: Block):
    stmt_cs = tuple(_compile_stmt(s) for s in block.stmts)
    cost = sum(_stmt_cost(s) for s in block.stmts)
    span = block.stmts[0].span if block.stmts else block.span

    def run(env, st):
        st.steps -= cost
        if st.steps < 0:
            raise _budget_err(span, "step")
        for c in stmt_cs:
            r = c(env, st)
            if r is not None:
                return r
        return None
    return run


class CompiledProgram:
    """A scoring function compiled to closures, reusable across calls."""

    __slots__ = ("params", "_entry", "_header_span")

    def __init__(self, fn: Function):
        self.params = fn.params
        self._entry = _compile_block(fn.body)
        self._header_span = fn.span

    def invoke(self, bindings, step_budget: int, value_budget: int):
        """Run the program; returns (value, steps_used).

        A program that falls off the end yields none.
        """
        env = {}
        for p in self.params:
            try:
                env[p] = bindings[p]
            except KeyError:
                raise _err("missing-binding",
                           f"no binding for parameter {p!r}",
                           self._header_span) from None
        st = _State(step_budget, value_budget)
        r = self._entry(env, st)
        value = r[0] if r is not None else None
        return value, step_budget - st.steps


_COMPILED_CACHE: dict[tuple[str, str], object] = {}

DEFAULT_BACKEND = "fast"


def get_compiled(program, backend: str = DEFAULT_BACKEND):
    """Compiled form of a program, cached per backend.

    "fast" transpiles to a Python function; "closure" is the reference
    closure-tree evaluator.  Both implement identical semantics and budget
    accounting (cross-checked by the property suite).
    """
    key = (program.id, backend)
    compiled = _COMPILED_CACHE.get(key)
    if compiled is None:
        if backend == "fast":
            from .pycompile import compile_fast
            compiled = compile_fast(program.ast)
        elif backend == "closure":
            compiled = CompiledProgram(program.ast)
        else:
            raise ValueError(f"unknown backend {backend!r}")
        _COMPILED_CACHE[key] = compiled
    return compiled


def evaluate(program, ctx: EvalContext):
    """Evaluate a program under the given context; returns its Value.

    Deterministic for identical (program, ctx) pairs, and never mutates
    anything reachable from ctx.bindings.
    """
    value, _ = get_compiled(program).invoke(ctx.bindings, ctx.step_budget,
                                            ctx.value_budget)
    return value
