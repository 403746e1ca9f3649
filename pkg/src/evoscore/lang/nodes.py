"""AST node types for the scoring-function language.

Nodes are frozen dataclasses so programs are immutable and hashable once
parsed.  Source spans are carried for error reporting but excluded from
equality, which makes structural comparison (round-trip tests, mutation
diffing) work on content alone.
"""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Span:
    line: int = 0
    col: int = 0


_NO_SPAN = Span()


def _span():
    return field(default=_NO_SPAN, compare=False, repr=False)


# --- expressions ---

@dataclass(frozen=True)
class IntLit:
    value: int
    span: Span = _span()


@dataclass(frozen=True)
class RealLit:
    value: float
    span: Span = _span()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    span: Span = _span()


@dataclass(frozen=True)
class NoneLit:
    span: Span = _span()


@dataclass(frozen=True)
class Ident:
    name: str
    span: Span = _span()


@dataclass(frozen=True)
class FieldAccess:
    obj: "Expr"
    name: str
    span: Span = _span()


@dataclass(frozen=True)
class Index:
    obj: "Expr"
    index: "Expr"
    span: Span = _span()


@dataclass(frozen=True)
class Unary:
    op: str  # "-" or "not"
    operand: "Expr"
    span: Span = _span()


@dataclass(frozen=True)
class Binary:
    op: str  # + - * / // % < <= > >= == != and or in "not in"
    left: "Expr"
    right: "Expr"
    span: Span = _span()


@dataclass(frozen=True)
class Call:
    name: str  # builtin name only
    args: tuple["Expr", ...]
    span: Span = _span()


@dataclass(frozen=True)
class TupleLit:
    items: tuple["Expr", ...]
    span: Span = _span()


@dataclass(frozen=True)
class ListLit:
    items: tuple["Expr", ...]
    span: Span = _span()


Expr = (
    IntLit | RealLit | BoolLit | NoneLit | Ident | FieldAccess | Index
    | Unary | Binary | Call | TupleLit | ListLit
)


# --- statements ---

@dataclass(frozen=True)
class Block:
    stmts: tuple["Stmt", ...]
    span: Span = _span()


@dataclass(frozen=True)
class Let:
    name: str
    value: Expr
    span: Span = _span()


@dataclass(frozen=True)
class Return:
    value: Expr
    span: Span = _span()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: Block
    orelse: Block | None
    span: Span = _span()


@dataclass(frozen=True)
class For:
    var: str
    iterable: Expr
    body: Block
    span: Span = _span()


Stmt = Let | Return | If | For


@dataclass(frozen=True)
class Function:
    name: str
    params: tuple[str, ...]
    body: Block
    span: Span = _span()


def count_nodes(node) -> int:
    """Number of AST nodes in an expression subtree (used for step costing)."""
    t = type(node)
    if t in (IntLit, RealLit, BoolLit, NoneLit, Ident):
        return 1
    if t is FieldAccess:
        return 1 + count_nodes(node.obj)
    if t is Index:
        return 1 + count_nodes(node.obj) + count_nodes(node.index)
    if t is Unary:
        return 1 + count_nodes(node.operand)
    if t is Binary:
        return 1 + count_nodes(node.left) + count_nodes(node.right)
    if t is Call:
        return 1 + sum(count_nodes(a) for a in node.args)
    if t in (TupleLit, ListLit):
        return 1 + sum(count_nodes(a) for a in node.items)
    raise TypeError(f"not an expression node: {t.__name__}")
