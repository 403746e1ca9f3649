"""Lexer, recursive-descent parser and static checks for scoring programs.

The surface syntax is a single function per file:

    fn score(a, b) {
        let x = a.field / 2;
        if x > 0 and b in a.items {
            return x;
        }
        for v in sorted(a.items) { let x = x + v; }
        return -x;
    }

Statements: ``let``, ``if``/``else``, ``for .. in`` over a list or mapping,
``return``.  Expressions: literals (int, real, true/false, none, tuples,
lists), identifiers, field access, indexing, unary ``-``/``not``, the binary
operators ``+ - * / // % < <= > >= == != in "not in" and or`` and calls to a
fixed builtin set.  There is no recursion, no unbounded loop, no string
manipulation and no way to mutate host data.

``parse_source`` also performs definite-assignment analysis: every
identifier must be a parameter, a loop variable, or introduced by a ``let``
on every path leading to its use.
"""
from __future__ import annotations

from .errors import ParseError
from .nodes import (
    Binary, Block, BoolLit, Call, Expr, FieldAccess, For, Function, Ident, If,
    Index, IntLit, Let, ListLit, NoneLit, RealLit, Return, Span, TupleLit,
    Unary,
)

KEYWORDS = {
    "fn", "let", "if", "else", "for", "in", "return",
    "and", "or", "not", "true", "false", "none",
}

# name -> (min_arity, max_arity or None for unbounded)
BUILTINS: dict[str, tuple[int, int | None]] = {
    "min": (1, None),
    "max": (1, None),
    "abs": (1, 1),
    "len": (1, 1),
    "floor": (1, 1),
    "ln": (1, 1),
    "sorted": (1, 1),
    "sum": (1, 1),
    "range": (1, 2),
}

INT_MIN = -(2 ** 63)
INT_MAX = 2 ** 63 - 1

_PUNCT2 = ("//", "<=", ">=", "==", "!=")
_PUNCT1 = set("+-*/%<>=(){}[].,;")


def _is_ident_start(c: str) -> bool:
    return c.isalpha() or c == "_"


def _is_ident_char(c: str) -> bool:
    return c.isalnum() or c == "_"


def tokenize(source: str) -> list[tuple[str, object, int, int]]:
    """Turn source text into (kind, value, line, col) tuples.

    Kinds: "name", "kw", "int", "real", "punct", "eof".
    """
    toks: list[tuple[str, object, int, int]] = []
    i, line, col = 0, 1, 1
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":  # comment to end of line
            while i < n and source[i] != "\n":
                i += 1
            continue
        start_col = col
        if _is_ident_start(c):
            j = i
            while j < n and _is_ident_char(source[j]):
                j += 1
            word = source[i:j]
            kind = "kw" if word in KEYWORDS else "name"
            toks.append((kind, word, line, start_col))
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            is_real = False
            if j < n and source[j] == ".":
                is_real = True
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    is_real = True
                    j = k
                    while j < n and source[j].isdigit():
                        j += 1
            text = source[i:j]
            if is_real:
                value = float(text)
                if value != value or value in (float("inf"), float("-inf")):
                    raise ParseError("syntax-error",
                                     f"real literal {text} is not finite",
                                     line, start_col)
                toks.append(("real", value, line, start_col))
            else:
                value = int(text)
                if value > INT_MAX:
                    raise ParseError("syntax-error",
                                     f"integer literal {text} exceeds 64 bits",
                                     line, start_col)
                toks.append(("int", value, line, start_col))
            col += j - i
            i = j
            continue
        two = source[i:i + 2]
        if two in _PUNCT2:
            toks.append(("punct", two, line, start_col))
            i += 2
            col += 2
            continue
        if c in _PUNCT1:
            toks.append(("punct", c, line, start_col))
            i += 1
            col += 1
            continue
        raise ParseError("syntax-error", f"unexpected character {c!r}", line, col)
    toks.append(("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.pos = 0

    def _peek(self, ahead: int = 0):
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def _next(self):
        t = self.toks[self.pos]
        if t[0] != "eof":
            self.pos += 1
        return t

    def _error(self, message: str, tok=None) -> ParseError:
        tok = tok or self._peek()
        return ParseError("syntax-error", message, tok[2], tok[3])

    def _expect_punct(self, text: str):
        kind, value, line, col = self._peek()
        if kind != "punct" or value != text:
            raise self._error(f"expected {text!r}, found {value!r}")
        return self._next()

    def _expect_kw(self, word: str):
        kind, value, line, col = self._peek()
        if kind != "kw" or value != word:
            raise self._error(f"expected {word!r}, found {value!r}")
        return self._next()

    def _expect_name(self) -> tuple[str, Span]:
        kind, value, line, col = self._peek()
        if kind != "name":
            raise self._error(f"expected identifier, found {value!r}")
        self._next()
        if value in BUILTINS:
            raise ParseError("syntax-error",
                             f"{value!r} is a builtin and cannot be bound",
                             line, col)
        return value, Span(line, col)

    def _at_punct(self, text: str) -> bool:
        kind, value, _, _ = self._peek()
        return kind == "punct" and value == text

    def _at_kw(self, word: str) -> bool:
        kind, value, _, _ = self._peek()
        return kind == "kw" and value == word

    # --- grammar ---

    def parse_function(self) -> Function:
        tok = self._expect_kw("fn")
        span = Span(tok[2], tok[3])
        name, _ = self._expect_name()
        self._expect_punct("(")
        params: list[str] = []
        if not self._at_punct(")"):
            while True:
                pname, pspan = self._expect_name()
                if pname in params:
                    raise ParseError("syntax-error",
                                     f"duplicate parameter {pname!r}",
                                     pspan.line, pspan.col)
                params.append(pname)
                if self._at_punct(","):
                    self._next()
                    continue
                break
        self._expect_punct(")")
        body = self._parse_block()
        kind, value, line, col = self._peek()
        if kind != "eof":
            raise self._error("trailing input after program")
        return Function(name, tuple(params), body, span)

    def _parse_block(self) -> Block:
        tok = self._expect_punct("{")
        span = Span(tok[2], tok[3])
        stmts: list = []
        while not self._at_punct("}"):
            stmts.append(self._parse_stmt())
        self._expect_punct("}")
        return Block(tuple(stmts), span)

    def _parse_stmt(self):
        kind, value, line, col = self._peek()
        span = Span(line, col)
        if kind == "kw" and value == "let":
            self._next()
            name, _ = self._expect_name()
            self._expect_punct("=")
            expr = self._parse_expr()
            self._expect_punct(";")
            return Let(name, expr, span)
        if kind == "kw" and value == "return":
            self._next()
            expr = self._parse_expr()
            self._expect_punct(";")
            return Return(expr, span)
        if kind == "kw" and value == "if":
            return self._parse_if()
        if kind == "kw" and value == "for":
            self._next()
            var, _ = self._expect_name()
            self._expect_kw("in")
            iterable = self._parse_expr()
            body = self._parse_block()
            return For(var, iterable, body, span)
        raise self._error(f"expected a statement, found {value!r}")

    def _parse_if(self) -> If:
        tok = self._expect_kw("if")
        span = Span(tok[2], tok[3])
        cond = self._parse_expr()
        then = self._parse_block()
        orelse = None
        if self._at_kw("else"):
            self._next()
            if self._at_kw("if"):
                # "else if" sugar: nested If inside a one-statement block
                nested = self._parse_if()
                orelse = Block((nested,), nested.span)
            else:
                orelse = self._parse_block()
        return If(cond, then, orelse, span)

    # expressions, lowest precedence first

    def _parse_expr(self) -> Expr:
        return self._parse_or()

    def _parse_or(self) -> Expr:
        left = self._parse_and()
        while self._at_kw("or"):
            kind, value, line, col = self._next()
            right = self._parse_and()
            left = Binary("or", left, right, Span(line, col))
        return left

    def _parse_and(self) -> Expr:
        left = self._parse_not()
        while self._at_kw("and"):
            kind, value, line, col = self._next()
            right = self._parse_not()
            left = Binary("and", left, right, Span(line, col))
        return left

    def _parse_not(self) -> Expr:
        if self._at_kw("not"):
            kind, value, line, col = self._next()
            operand = self._parse_not()
            return Unary("not", operand, Span(line, col))
        return self._parse_comparison()

    _CMP_OPS = {"<", "<=", ">", ">=", "==", "!="}

    def _parse_comparison(self) -> Expr:
        left = self._parse_arith()
        kind, value, line, col = self._peek()
        op = None
        if kind == "punct" and value in self._CMP_OPS:
            op = value
            self._next()
        elif kind == "kw" and value == "in":
            op = "in"
            self._next()
        elif kind == "kw" and value == "not" and self._peek(1)[:2] == ("kw", "in"):
            self._next()
            self._next()
            op = "not in"
        if op is None:
            return left
        right = self._parse_arith()
        nkind, nvalue, _, _ = self._peek()
        if (nkind == "punct" and nvalue in self._CMP_OPS) or (nkind == "kw" and nvalue == "in"):
            raise self._error("comparisons do not chain; use 'and'")
        return Binary(op, left, right, Span(line, col))

    def _parse_arith(self) -> Expr:
        left = self._parse_term()
        while True:
            kind, value, line, col = self._peek()
            if kind == "punct" and value in ("+", "-"):
                self._next()
                right = self._parse_term()
                left = Binary(value, left, right, Span(line, col))
            else:
                return left

    def _parse_term(self) -> Expr:
        left = self._parse_unary()
        while True:
            kind, value, line, col = self._peek()
            if kind == "punct" and value in ("*", "/", "//", "%"):
                self._next()
                right = self._parse_unary()
                left = Binary(value, left, right, Span(line, col))
            else:
                return left

    def _parse_unary(self) -> Expr:
        if self._at_punct("-"):
            kind, value, line, col = self._next()
            operand = self._parse_unary()
            span = Span(line, col)
            # fold negated literals so constants mutate as single nodes
            if type(operand) is IntLit:
                v = -operand.value
                if v < INT_MIN:
                    raise ParseError("syntax-error",
                                     "integer literal exceeds 64 bits",
                                     line, col)
                return IntLit(v, span)
            if type(operand) is RealLit:
                return RealLit(-operand.value, span)
            return Unary("-", operand, span)
        return self._parse_postfix()

    def _parse_postfix(self) -> Expr:
        expr = self._parse_atom()
        while True:
            kind, value, line, col = self._peek()
            if kind == "punct" and value == ".":
                self._next()
                nkind, nvalue, nline, ncol = self._peek()
                if nkind != "name":
                    raise self._error("expected field name after '.'")
                if nvalue.startswith("_"):
                    raise ParseError("syntax-error",
                                     f"field {nvalue!r} is not accessible",
                                     nline, ncol)
                self._next()
                expr = FieldAccess(expr, nvalue, Span(line, col))
            elif kind == "punct" and value == "[":
                self._next()
                index = self._parse_expr()
                self._expect_punct("]")
                expr = Index(expr, index, Span(line, col))
            elif kind == "punct" and value == "(":
                if type(expr) is not Ident or expr.name not in BUILTINS:
                    raise self._error("only builtin functions can be called")
                self._next()
                args: list[Expr] = []
                if not self._at_punct(")"):
                    while True:
                        args.append(self._parse_expr())
                        if self._at_punct(","):
                            self._next()
                            continue
                        break
                self._expect_punct(")")
                lo, hi = BUILTINS[expr.name]
                if len(args) < lo or (hi is not None and len(args) > hi):
                    raise ParseError(
                        "arity-error",
                        f"{expr.name} takes {lo}"
                        + (f"..{hi}" if hi is not None and hi != lo else ("+" if hi is None else ""))
                        + f" arguments, got {len(args)}",
                        expr.span.line, expr.span.col)
                expr = Call(expr.name, tuple(args), expr.span)
            else:
                return expr

    def _parse_atom(self) -> Expr:
        kind, value, line, col = self._peek()
        span = Span(line, col)
        if kind == "int":
            self._next()
            return IntLit(value, span)
        if kind == "real":
            self._next()
            return RealLit(value, span)
        if kind == "kw" and value == "true":
            self._next()
            return BoolLit(True, span)
        if kind == "kw" and value == "false":
            self._next()
            return BoolLit(False, span)
        if kind == "kw" and value == "none":
            self._next()
            return NoneLit(span)
        if kind == "name":
            self._next()
            return Ident(value, span)
        if kind == "punct" and value == "(":
            self._next()
            if self._at_punct(")"):
                raise self._error("empty parentheses")
            first = self._parse_expr()
            if self._at_punct(","):
                items = [first]
                while self._at_punct(","):
                    self._next()
                    if self._at_punct(")"):
                        break
                    items.append(self._parse_expr())
                self._expect_punct(")")
                return TupleLit(tuple(items), span)
            self._expect_punct(")")
            return first
        if kind == "punct" and value == "[":
            self._next()
            items: list[Expr] = []
            if not self._at_punct("]"):
                while True:
                    items.append(self._parse_expr())
                    if self._at_punct(","):
                        self._next()
                        continue
                    break
            self._expect_punct("]")
            return ListLit(tuple(items), span)
        raise self._error(f"expected an expression, found {value!r}")


# --- static checks ---

def _check_expr(expr: Expr, declared: set[str]):
    t = type(expr)
    if t is Ident:
        if expr.name not in declared:
            raise ParseError("undeclared-identifier",
                             f"name {expr.name!r} is not defined here",
                             expr.span.line, expr.span.col)
    elif t is FieldAccess:
        _check_expr(expr.obj, declared)
    elif t is Index:
        _check_expr(expr.obj, declared)
        _check_expr(expr.index, declared)
    elif t is Unary:
        _check_expr(expr.operand, declared)
    elif t is Binary:
        _check_expr(expr.left, declared)
        _check_expr(expr.right, declared)
    elif t is Call:
        for a in expr.args:
            _check_expr(a, declared)
    elif t in (TupleLit, ListLit):
        for a in expr.items:
            _check_expr(a, declared)
    # literals need no check


def _check_block(block: Block, declared: set[str]) -> set[str]:
    """Definite-assignment walk; returns names declared after the block.

    Branches only keep names declared on both paths; loop bodies may not
    run, so their declarations do not escape.
    """
    names = set(declared)
    for stmt in block.stmts:
        t = type(stmt)
        if t is Let:
            _check_expr(stmt.value, names)
            names.add(stmt.name)
        elif t is Return:
            _check_expr(stmt.value, names)
        elif t is If:
            _check_expr(stmt.cond, names)
            after_then = _check_block(stmt.then, names)
            if stmt.orelse is not None:
                after_else = _check_block(stmt.orelse, names)
                names = after_then & after_else
            # without an else, the branch may be skipped: keep `names`
        elif t is For:
            _check_expr(stmt.iterable, names)
            _check_block(stmt.body, names | {stmt.var})
        else:  # pragma: no cover - parser emits no other statement kinds
            raise TypeError(f"unknown statement {t.__name__}")
    return names


def check_function(fn: Function):
    _check_block(fn.body, set(fn.params))


def parse_source(source: str) -> Function:
    """Parse text into a checked Function AST.

    Raises ParseError for syntax errors, undeclared identifiers or wrong
    builtin arity, with the offending line and column.
    """
    fn = _Parser(tokenize(source)).parse_function()
    check_function(fn)
    return fn
