"""Canonical pretty-printer for scoring-program ASTs.

The output is deterministic and minimal-parenthesised; ``parse_source``
applied to rendered text yields a structurally identical AST, which the
property suite enforces.
"""
from __future__ import annotations

from .nodes import (
    Binary, Block, BoolLit, Call, FieldAccess, For, Function, Ident, If,
    Index, IntLit, ListLit, NoneLit, RealLit, Return, Let, TupleLit, Unary,
)

_BIN_PREC = {
    "or": 1,
    "and": 2,
    "<": 4, "<=": 4, ">": 4, ">=": 4, "==": 4, "!=": 4, "in": 4, "not in": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6, "//": 6, "%": 6,
}
_NOT_PREC = 3
_NEG_PREC = 7
_ATOM_PREC = 9

_INDENT = "    "


def _real_text(v: float) -> str:
    # repr round-trips; normalise the exponent-free integral form to x.0
    return repr(v)


def render_expr(expr, ctx_prec: int = 0) -> str:
    t = type(expr)
    if t is IntLit:
        return str(expr.value)
    if t is RealLit:
        return _real_text(expr.value)
    if t is BoolLit:
        return "true" if expr.value else "false"
    if t is NoneLit:
        return "none"
    if t is Ident:
        return expr.name
    if t is FieldAccess:
        obj = render_expr(expr.obj, _ATOM_PREC)
        # a numeric literal receiver would lex as part of the number (3.u)
        if type(expr.obj) in (IntLit, RealLit):
            obj = f"({obj})"
        return f"{obj}.{expr.name}"
    if t is Index:
        return f"{render_expr(expr.obj, _ATOM_PREC)}[{render_expr(expr.index)}]"
    if t is Call:
        args = ", ".join(render_expr(a) for a in expr.args)
        return f"{expr.name}({args})"
    if t is TupleLit:
        inner = ", ".join(render_expr(a) for a in expr.items)
        if len(expr.items) == 1:
            inner += ","
        return f"({inner})"
    if t is ListLit:
        return "[" + ", ".join(render_expr(a) for a in expr.items) + "]"
    if t is Unary:
        if expr.op == "not":
            text = f"not {render_expr(expr.operand, _NOT_PREC)}"
            return f"({text})" if ctx_prec > _NOT_PREC else text
        text = f"-{render_expr(expr.operand, _NEG_PREC)}"
        return f"({text})" if ctx_prec > _NEG_PREC else text
    if t is Binary:
        prec = _BIN_PREC[expr.op]
        # comparisons do not chain, so a comparison operand needs parens on
        # both sides; ordinary binaries are left-associative
        left = render_expr(expr.left, prec + 1 if prec == 4 else prec)
        right = render_expr(expr.right, prec + 1)
        text = f"{left} {expr.op} {right}"
        return f"({text})" if prec < ctx_prec else text
    raise TypeError(f"not an expression node: {t.__name__}")


def _render_block(block: Block, depth: int, out: list[str]):
    pad = _INDENT * depth
    for stmt in block.stmts:
        t = type(stmt)
        if t is Let:
            out.append(f"{pad}let {stmt.name} = {render_expr(stmt.value)};")
        elif t is Return:
            out.append(f"{pad}return {render_expr(stmt.value)};")
        elif t is For:
            out.append(f"{pad}for {stmt.var} in {render_expr(stmt.iterable)} {{")
            _render_block(stmt.body, depth + 1, out)
            out.append(f"{pad}}}")
        elif t is If:
            _render_if(stmt, depth, out, pad + "if")
        else:  # pragma: no cover
            raise TypeError(f"unknown statement {t.__name__}")


def _render_if(stmt: If, depth: int, out: list[str], opener: str):
    pad = _INDENT * depth
    out.append(f"{opener} {render_expr(stmt.cond)} {{")
    _render_block(stmt.then, depth + 1, out)
    orelse = stmt.orelse
    if orelse is None:
        out.append(f"{pad}}}")
        return
    if len(orelse.stmts) == 1 and type(orelse.stmts[0]) is If:
        _render_if(orelse.stmts[0], depth, out, f"{pad}}} else if")
        return
    out.append(f"{pad}}} else {{")
    _render_block(orelse, depth + 1, out)
    out.append(f"{pad}}}")


def render_function(fn: Function) -> str:
    out = [f"fn {fn.name}({', '.join(fn.params)}) {{"]
    _render_block(fn.body, 1, out)
    out.append("}")
    return "\n".join(out) + "\n"
