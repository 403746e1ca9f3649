"""Genetic operators over scoring-program ASTs.

These stand in for an external mutation service: each operator takes a
well-formed program and returns a well-formed program, deterministically
for a given seed.  When an operator finds nothing to act on it signals
`NoApplicableSite` instead of fabricating a change.
"""
from __future__ import annotations

import dataclasses
import math
import random
from dataclasses import dataclass

from .nodes import (
    Binary, Block, Call, FieldAccess, For, Function, Ident, If, Index,
    IntLit, Let, ListLit, RealLit, Return, TupleLit, Unary,
)
from .errors import LangError
from .program import ScoringProgram, parse
from .render import render_function

MUTATION_KINDS = (
    "constant-jitter",
    "subtree-replace",
    "threshold-guard-insert",
    "linear-recombine",
    "parent-crossover",
)

_INT_MAX = 2 ** 63 - 1


@dataclass(frozen=True)
class MutationOp:
    kind: str
    rng_seed: int

    def __post_init__(self):
        if self.kind not in MUTATION_KINDS:
            raise ValueError(f"unknown mutation kind {self.kind!r}")


class NoApplicableSite(Exception):
    """The operator found no site to act on; the program is unchanged."""


class MutationError(Exception):
    """The operator produced something unusable (should not happen)."""


# --- AST walking ---

def _expr_children(expr):
    t = type(expr)
    if t is FieldAccess:
        return (expr.obj,)
    if t is Index:
        return (expr.obj, expr.index)
    if t is Unary:
        return (expr.operand,)
    if t is Binary:
        return (expr.left, expr.right)
    if t is Call:
        return expr.args
    if t in (TupleLit, ListLit):
        return expr.items
    return ()


def iter_expr_nodes(expr):
    yield expr
    for child in _expr_children(expr):
        yield from iter_expr_nodes(child)


def expr_sites(fn: Function):
    """Yield (expr_node, scope) pairs for every expression node in the body.

    scope is the frozenset of names definitely bound where that expression
    is evaluated, mirroring the parser's definite-assignment rule.
    """
    sites: list[tuple[object, frozenset[str]]] = []

    def visit_block(block: Block, declared: set[str]) -> set[str]:
        names = set(declared)
        for stmt in block.stmts:
            t = type(stmt)
            if t is Let:
                for node in iter_expr_nodes(stmt.value):
                    sites.append((node, frozenset(names)))
                names.add(stmt.name)
            elif t is Return:
                for node in iter_expr_nodes(stmt.value):
                    sites.append((node, frozenset(names)))
            elif t is If:
                for node in iter_expr_nodes(stmt.cond):
                    sites.append((node, frozenset(names)))
                after_then = visit_block(stmt.then, names)
                if stmt.orelse is not None:
                    after_else = visit_block(stmt.orelse, names)
                    names = after_then & after_else
            elif t is For:
                for node in iter_expr_nodes(stmt.iterable):
                    sites.append((node, frozenset(names)))
                visit_block(stmt.body, names | {stmt.var})
        return names

    visit_block(fn.body, set(fn.params))
    return sites


def free_names(expr) -> frozenset[str]:
    return frozenset(n.name for n in iter_expr_nodes(expr) if type(n) is Ident)


# --- immutable tree surgery (identity-based) ---

def _replace_expr(node, target, new):
    if node is target:
        return new
    t = type(node)
    if t is FieldAccess:
        obj = _replace_expr(node.obj, target, new)
        return node if obj is node.obj else dataclasses.replace(node, obj=obj)
    if t is Index:
        obj = _replace_expr(node.obj, target, new)
        idx = _replace_expr(node.index, target, new)
        if obj is node.obj and idx is node.index:
            return node
        return dataclasses.replace(node, obj=obj, index=idx)
    if t is Unary:
        inner = _replace_expr(node.operand, target, new)
        return node if inner is node.operand else dataclasses.replace(node, operand=inner)
    if t is Binary:
        left = _replace_expr(node.left, target, new)
        right = _replace_expr(node.right, target, new)
        if left is node.left and right is node.right:
            return node
        return dataclasses.replace(node, left=left, right=right)
    if t is Call:
        args = tuple(_replace_expr(a, target, new) for a in node.args)
        if all(a is b for a, b in zip(args, node.args)):
            return node
        return dataclasses.replace(node, args=args)
    if t in (TupleLit, ListLit):
        items = tuple(_replace_expr(a, target, new) for a in node.items)
        if all(a is b for a, b in zip(items, node.items)):
            return node
        return dataclasses.replace(node, items=items)
    return node


def _replace_in_block(block: Block, target, new) -> Block:
    changed = False
    stmts = []
    for stmt in block.stmts:
        t = type(stmt)
        if t is Let:
            v = _replace_expr(stmt.value, target, new)
            if v is not stmt.value:
                stmt = dataclasses.replace(stmt, value=v)
                changed = True
        elif t is Return:
            v = _replace_expr(stmt.value, target, new)
            if v is not stmt.value:
                stmt = dataclasses.replace(stmt, value=v)
                changed = True
        elif t is If:
            cond = _replace_expr(stmt.cond, target, new)
            then = _replace_in_block(stmt.then, target, new)
            orelse = (_replace_in_block(stmt.orelse, target, new)
                      if stmt.orelse is not None else None)
            if cond is not stmt.cond or then is not stmt.then or orelse is not stmt.orelse:
                stmt = dataclasses.replace(stmt, cond=cond, then=then, orelse=orelse)
                changed = True
        elif t is For:
            iterable = _replace_expr(stmt.iterable, target, new)
            body = _replace_in_block(stmt.body, target, new)
            if iterable is not stmt.iterable or body is not stmt.body:
                stmt = dataclasses.replace(stmt, iterable=iterable, body=body)
                changed = True
        stmts.append(stmt)
    if not changed:
        return block
    return dataclasses.replace(block, stmts=tuple(stmts))


def replace_expr_in_function(fn: Function, target, new) -> Function:
    body = _replace_in_block(fn.body, target, new)
    if body is fn.body:
        raise MutationError("target expression not found in function")
    return dataclasses.replace(fn, body=body)


# --- random expression material ---

def random_expr(rng: random.Random, names: tuple[str, ...], depth: int):
    """A small random numeric expression over the given names."""
    if depth <= 0 or not names or rng.random() < 0.3:
        if names and rng.random() < 0.6:
            return Ident(rng.choice(names))
        if rng.random() < 0.5:
            return IntLit(rng.randint(-10, 10))
        return RealLit(round(rng.uniform(-10.0, 10.0), 3))
    roll = rng.random()
    if roll < 0.15:
        return Call("abs", (random_expr(rng, names, depth - 1),))
    op = rng.choice(("+", "-", "*"))
    return Binary(op, random_expr(rng, names, depth - 1),
                  random_expr(rng, names, depth - 1))


# --- operators ---

def _jitter_literal(rng: random.Random, node):
    f = rng.uniform(0.5, 2.0)
    if type(node) is IntLit:
        v = int(round(node.value * f))
        if v == node.value:
            v += rng.choice((-1, 1))
        v = max(-_INT_MAX, min(_INT_MAX, v))
        if v == node.value:
            v -= 1
        return IntLit(v)
    v = node.value * f
    if not math.isfinite(v) or v == node.value:
        v = node.value + rng.uniform(0.1, 1.0) if math.isfinite(node.value) else rng.uniform(-1, 1)
    return RealLit(v)


def _op_constant_jitter(fn, rng):
    sites = [(n, s) for n, s in expr_sites(fn) if type(n) in (IntLit, RealLit)]
    if not sites:
        raise NoApplicableSite("no numeric literal to jitter")
    node, _ = sites[rng.randrange(len(sites))]
    return replace_expr_in_function(fn, node, _jitter_literal(rng, node))


def _op_subtree_replace(fn, rng):
    sites = expr_sites(fn)
    if not sites:
        raise NoApplicableSite("program has no expressions")
    for _ in range(8):
        node, scope = sites[rng.randrange(len(sites))]
        new = random_expr(rng, tuple(sorted(scope)), depth=2)
        if new != node:
            return replace_expr_in_function(fn, node, new)
    raise NoApplicableSite("could not produce a differing subtree")


def _op_threshold_guard(fn, rng):
    candidates = [n for n, _ in expr_sites(fn)
                  if type(n) is FieldAccess and free_names(n) <= set(fn.params)]
    if not candidates:
        candidates = [Ident(p) for p in fn.params]
    if not candidates:
        raise NoApplicableSite("no expression to guard on")
    probe = candidates[rng.randrange(len(candidates))]
    threshold = int(round(math.exp(rng.uniform(0.0, math.log(10_000)))))
    guard = If(
        Binary(">", probe, IntLit(threshold)),
        Block((Return(IntLit(-100)),)),
        None,
    )
    body = dataclasses.replace(fn.body, stmts=(guard,) + fn.body.stmts)
    return dataclasses.replace(fn, body=body)


def _collect_returns(block: Block):
    found = []
    for stmt in block.stmts:
        t = type(stmt)
        if t is Return:
            found.append(stmt)
        elif t is If:
            found.extend(_collect_returns(stmt.then))
            if stmt.orelse is not None:
                found.extend(_collect_returns(stmt.orelse))
        elif t is For:
            found.extend(_collect_returns(stmt.body))
    return found


def _op_linear_recombine(fn, rng):
    returns = _collect_returns(fn.body)
    if not returns:
        raise NoApplicableSite("no return statement")
    ret = returns[rng.randrange(len(returns))]
    sites = expr_sites(fn)
    scope_at_ret = next((s for n, s in sites if n is ret.value), frozenset(fn.params))
    partners = [n for n, s in sites
                if n is not ret.value and free_names(n) <= scope_at_ret]
    partner = (partners[rng.randrange(len(partners))]
               if partners else RealLit(round(rng.uniform(-2, 2), 3)))
    a = round(rng.uniform(-2.0, 2.0), 3)
    b = round(rng.uniform(-2.0, 2.0), 3)
    new_value = Binary("+",
                       Binary("*", RealLit(a), ret.value),
                       Binary("*", RealLit(b), partner))
    new_ret = dataclasses.replace(ret, value=new_value)
    body = _replace_stmt_in_block(fn.body, ret, new_ret)
    if body is fn.body:
        raise MutationError("return statement not found")
    return dataclasses.replace(fn, body=body)


def _replace_stmt_in_block(block: Block, target, new) -> Block:
    changed = False
    stmts = []
    for stmt in block.stmts:
        if stmt is target:
            stmts.append(new)
            changed = True
            continue
        t = type(stmt)
        if t is If:
            then = _replace_stmt_in_block(stmt.then, target, new)
            orelse = (_replace_stmt_in_block(stmt.orelse, target, new)
                      if stmt.orelse is not None else None)
            if then is not stmt.then or orelse is not stmt.orelse:
                stmt = dataclasses.replace(stmt, then=then, orelse=orelse)
                changed = True
        elif t is For:
            body = _replace_stmt_in_block(stmt.body, target, new)
            if body is not stmt.body:
                stmt = dataclasses.replace(stmt, body=body)
                changed = True
        stmts.append(stmt)
    if not changed:
        return block
    return dataclasses.replace(block, stmts=tuple(stmts))


def _op_parent_crossover(fn, rng, parents):
    if not parents:
        raise ValueError("parent-crossover needs at least one parent program")
    donor = parents[rng.randrange(len(parents))].ast
    donor_subtrees = [n for n, _ in expr_sites(donor)]
    targets = expr_sites(fn)
    if not donor_subtrees or not targets:
        raise NoApplicableSite("nothing to cross over")
    for _ in range(16):
        node, scope = targets[rng.randrange(len(targets))]
        graft = donor_subtrees[rng.randrange(len(donor_subtrees))]
        if free_names(graft) <= scope and graft != node:
            return replace_expr_in_function(fn, node, graft)
    raise NoApplicableSite("no scope-compatible donor subtree")


def mutate(program: ScoringProgram, parents: list[ScoringProgram],
           op: MutationOp) -> ScoringProgram:
    """Apply one mutation operator; deterministic for a given op.rng_seed.

    Raises NoApplicableSite when the program offers no usable site, and
    ValueError when parent-crossover is invoked without parents.
    """
    rng = random.Random(op.rng_seed)
    fn = program.ast
    if op.kind == "constant-jitter":
        new_fn = _op_constant_jitter(fn, rng)
    elif op.kind == "subtree-replace":
        new_fn = _op_subtree_replace(fn, rng)
    elif op.kind == "threshold-guard-insert":
        new_fn = _op_threshold_guard(fn, rng)
    elif op.kind == "linear-recombine":
        new_fn = _op_linear_recombine(fn, rng)
    else:
        new_fn = _op_parent_crossover(fn, rng, parents)
    try:
        out = parse(render_function(new_fn))
    except LangError as exc:  # pragma: no cover - operators build valid trees
        raise MutationError(f"operator produced an unparseable program: {exc}") from exc
    if out.ast == program.ast:
        raise NoApplicableSite("mutation produced an identical program")
    return out
