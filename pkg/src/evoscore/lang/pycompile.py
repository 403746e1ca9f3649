"""Transpiling evaluator backend: scoring AST -> generated Python function.

The closure evaluator in ``interp`` is the reference semantics; this
backend exists purely for speed (full-scan scorers run a few times faster
under CPython when names become locals and arithmetic inlines).  The two
backends must agree bit-for-bit on results, raised error kinds/spans and
steps consumed; a property suite cross-checks them on random programs.

Safety note: the generated source is assembled only from lexer-validated
identifiers (mangled with a ``v_`` prefix), repr() of finite numeric
literals, and fixed templates.  No host or candidate string reaches the
emitted code unescaped.
"""
from __future__ import annotations

import math

from .errors import EvalError
from .interp import (
    _BUILTIN_IMPL, _State, _charge, _err, _order_lt, _stmt_cost, _type_name,
    values_equal,
)
from .nodes import (
    Binary, Block, BoolLit, Call, FieldAccess, For, Function, Ident, If,
    Index, IntLit, Let, ListLit, NoneLit, RealLit, Return, Span, TupleLit,
    Unary,
)

_INT_MIN = -(2 ** 63)
_INT_MAX = 2 ** 63 - 1

_NUM_CHECK = "({v}.__class__ is int or {v}.__class__ is float)"


def _literal_kind(node) -> str | None:
    t = type(node)
    if t is IntLit:
        return "int"
    if t is RealLit:
        return "real"
    if t is BoolLit:
        return "bool"
    if t is NoneLit:
        return "none"
    return None


def _nonzero_literal(node) -> bool:
    return type(node) in (IntLit, RealLit) and node.value != 0


def _and(cond_a: str, cond_b: str) -> str:
    if cond_a == "False" or cond_b == "False":
        return "False"
    if cond_a == "True":
        return cond_b
    if cond_b == "True":
        return cond_a
    return f"{cond_a} and {cond_b}"


def _iter_items_fast(v, span: Span):
    t = type(v)
    if t is list or t is tuple:
        return v
    if t is dict:
        return list(v.keys())
    raise _err("type-error", f"cannot iterate {_type_name(v)}", span)


def _in_seq(item, seq, st: _State, span: Span) -> bool:
    _charge(st, len(seq) + 1, span)
    return any(values_equal(item, x) for x in seq)


def _cmp_slow(op: str, a, b, span: Span) -> bool:
    if op == "<":
        return _order_lt(a, b, span)
    if op == ">":
        return _order_lt(b, a, span)
    if op == "<=":
        return not _order_lt(b, a, span)
    return not _order_lt(a, b, span)


class _Emitter:
    def __init__(self):
        self.lines: list[str] = []
        self.spans: list[Span] = []
        self.indent = 1  # function-body level
        self._temp = 0

    def temp(self) -> str:
        self._temp += 1
        return f"_t{self._temp}"

    def span(self, span: Span) -> int:
        self.spans.append(span)
        return len(self.spans) - 1

    def put(self, line: str):
        self.lines.append("    " * self.indent + line)

    def materialize(self, atom: str) -> str:
        """Bind literal atoms to a temp so `is True` checks compare names."""
        if atom[0] == "v" or atom[0] == "_":
            return atom
        t = self.temp()
        self.put(f"{t} = {atom}")
        return t

    # --- expressions: emit guard lines, return an atom string ---

    def expr(self, node) -> str:
        t = type(node)
        if t is IntLit:
            return f"({node.value!r})"  # parens keep 5.__class__ parseable
        if t is RealLit:
            return f"({node.value!r})"
        if t is BoolLit:
            return "True" if node.value else "False"
        if t is NoneLit:
            return "None"
        if t is Ident:
            return f"v_{node.name}"
        if t is FieldAccess:
            obj = self.expr(node.obj)
            si = self.span(node.span)
            out = self.temp()
            self.put("try:")
            self.put(f"    {out} = {obj}.{node.name}")
            self.put("except AttributeError:")
            self.put(f"    _field_err({obj}, {node.name!r}, {si})")
            return out
        if t is Index:
            return self._index(node)
        if t is Unary:
            return self._unary(node)
        if t is Binary:
            return self._binary(node)
        if t is Call:
            return self._call(node)
        if t is TupleLit or t is ListLit:
            items = [self.expr(a) for a in node.items]
            si = self.span(node.span)
            out = self.temp()
            self.put(f"_st.values -= {len(items) + 1}")
            self.put(f"if _st.values < 0: _verr({si})")
            if t is TupleLit:
                body = ", ".join(items) + ("," if len(items) == 1 else "")
                self.put(f"{out} = ({body})")
            else:
                self.put(f"{out} = [{', '.join(items)}]")
            return out
        raise TypeError(f"not an expression node: {t.__name__}")

    def _index(self, node) -> str:
        obj = self.expr(node.obj)
        key = self.expr(node.index)
        si = self.span(node.span)
        out = self.temp()
        if _literal_kind(node.obj) is not None:
            # a scalar literal is never indexable; subscripting it in the
            # generated source would warn at compile time
            self.put(f"{out} = _not_indexable({obj}, {si})")
            return out
        self.put(f"if {obj}.__class__ is dict:")
        self.put("    try:")
        self.put(f"        {out} = {obj}[{key}]")
        self.put("    except KeyError:")
        self.put(f"        _key_missing({key}, {si})")
        self.put("    except TypeError:")
        self.put(f"        _key_bad({key}, {si})")
        self.put(f"elif {obj}.__class__ is list or {obj}.__class__ is tuple:")
        self.put(f"    if {key}.__class__ is not int: _index_type({key}, {si})")
        self.put("    try:")
        self.put(f"        {out} = {obj}[{key}]")
        self.put("    except IndexError:")
        self.put(f"        _index_range({key}, {si})")
        self.put("else:")
        self.put(f"    _not_indexable({obj}, {si})")
        return out

    def _unary(self, node) -> str:
        a = self.expr(node.operand)
        si = self.span(node.span)
        out = self.temp()
        if node.op == "not":
            a = self.materialize(a)
            self.put(f"if {a} is True: {out} = False")
            self.put(f"elif {a} is False: {out} = True")
            self.put(f"else: _bool_op_err('not', {a}, {si})")
            return out
        self.put(f"if {a}.__class__ is int:")
        self.put(f"    {out} = -{a}")
        self.put(f"    if {out} > {_INT_MAX} or {out} < {_INT_MIN}: _ovf({si})")
        self.put(f"elif {a}.__class__ is float: {out} = -{a}")
        self.put(f"else: _neg_err({a}, {si})")
        return out

    def _binary(self, node) -> str:
        op = node.op
        if op in ("and", "or"):
            return self._bool_binary(node)
        a = self.expr(node.left)
        b = self.expr(node.right)
        si = self.span(node.span)
        out = self.temp()
        # kinds known at compile time let us drop runtime guards; an operand
        # whose kind is known to be numeric never takes the error branch
        kind_a = _literal_kind(node.left)
        kind_b = _literal_kind(node.right)
        int_a = f"{a}.__class__ is int" if kind_a is None else \
            ("True" if kind_a == "int" else "False")
        int_b = f"{b}.__class__ is int" if kind_b is None else \
            ("True" if kind_b == "int" else "False")
        num_a = _NUM_CHECK.format(v=a) if kind_a is None else \
            ("True" if kind_a in ("int", "real") else "False")
        num_b = _NUM_CHECK.format(v=b) if kind_b is None else \
            ("True" if kind_b in ("int", "real") else "False")
        both_int = _and(int_a, int_b)
        both_num = _and(num_a, num_b)
        if op in ("+", "-", "*"):
            if both_int == "False" and both_num == "True":
                self.put(f"{out} = {a} {op} {b}")  # a real is involved
                return out
            emitted_if = False
            if both_int != "False":
                self.put(f"if {both_int}:" if both_int != "True" else "if True:")
                self.put(f"    {out} = {a} {op} {b}")
                self.put(f"    if {out} > {_INT_MAX} or {out} < {_INT_MIN}: _ovf({si})")
                emitted_if = True
            if both_int != "True":
                lead = "elif" if emitted_if else "if"
                self.put(f"{lead} {both_num}: {out} = {a} {op} {b}"
                         if both_num != "True" else
                         f"{lead} True: {out} = {a} {op} {b}")
                self.put(f"else: _arith_err({op!r}, {a}, {b}, {si})")
            return out
        if op == "/":
            zero_guard = not (kind_b in ("int", "real") and _nonzero_literal(node.right))
            if both_num == "True":
                if zero_guard:
                    self.put(f"if {b} == 0: _dbz('division', {si})")
                self.put(f"{out} = {a} / {b}")
                return out
            self.put(f"if {both_num}:")
            if zero_guard:
                self.put(f"    if {b} == 0: _dbz('division', {si})")
            self.put(f"    {out} = {a} / {b}")
            self.put(f"else: _arith_err('/', {a}, {b}, {si})")
            return out
        if op == "//":
            zero_guard = not (kind_b in ("int", "real") and _nonzero_literal(node.right))
            self.put(f"if {both_int}:" if both_int != "True" else "if True:")
            if zero_guard:
                self.put(f"    if {b} == 0: _dbz('floor division', {si})")
            self.put(f"    {out} = {a} // {b}")
            self.put(f"    if {out} > {_INT_MAX} or {out} < {_INT_MIN}: _ovf({si})")
            if both_int != "True":
                self.put(f"elif {both_num}: {out} = _floordiv_mixed({a}, {b}, {si})")
                self.put(f"else: _arith_err('//', {a}, {b}, {si})")
            return out
        if op == "%":
            zero_guard = not (kind_b in ("int", "real") and _nonzero_literal(node.right))
            if both_num == "True":
                if zero_guard:
                    self.put(f"if {b} == 0: _dbz('modulo', {si})")
                self.put(f"{out} = {a} % {b}")
                return out
            self.put(f"if {both_num}:")
            if zero_guard:
                self.put(f"    if {b} == 0: _dbz('modulo', {si})")
            self.put(f"    {out} = {a} % {b}")
            self.put(f"else: _arith_err('%', {a}, {b}, {si})")
            return out
        if op in ("<", "<=", ">", ">="):
            if both_num == "True":
                self.put(f"{out} = {a} {op} {b}")
            else:
                self.put(f"if {both_num}: {out} = {a} {op} {b}")
                self.put(f"else: {out} = _cmp_slow({op!r}, {a}, {b}, _spans[{si}])")
            return out
        if op == "==":
            if both_int == "True":
                self.put(f"{out} = {a} == {b}")
            else:
                self.put(f"if {both_int}: {out} = {a} == {b}")
                self.put(f"else: {out} = _eq({a}, {b})")
            return out
        if op == "!=":
            if both_int == "True":
                self.put(f"{out} = {a} != {b}")
            else:
                self.put(f"if {both_int}: {out} = {a} != {b}")
                self.put(f"else: {out} = not _eq({a}, {b})")
            return out
        if op in ("in", "not in"):
            self.put(f"if {b}.__class__ is dict:")
            self.put("    try:")
            self.put(f"        {out} = {a} in {b}")
            self.put("    except TypeError:")
            self.put(f"        _key_bad({a}, {si})")
            self.put(f"elif {b}.__class__ is list or {b}.__class__ is tuple:")
            self.put(f"    {out} = _in_seq({a}, {b}, _st, _spans[{si}])")
            self.put("else:")
            self.put(f"    _in_err({b}, {si})")
            if op == "not in":
                self.put(f"{out} = not {out}")
            return out
        raise ValueError(f"unknown operator {op!r}")  # pragma: no cover

    def _bool_binary(self, node) -> str:
        op = node.op
        si = self.span(node.span)
        out = self.temp()
        a = self.materialize(self.expr(node.left))
        first, second = ("True", "False") if op == "and" else ("False", "True")
        # short-circuit: only the continuing branch evaluates the right side
        self.put(f"if {a} is {second}: {out} = {a}")
        self.put(f"elif {a} is {first}:")
        self.indent += 1
        b = self.materialize(self.expr(node.right))
        self.put(f"if {b}.__class__ is not bool: _bool_op_err({op!r}, {b}, {si})")
        self.put(f"{out} = {b}")
        self.indent -= 1
        self.put("else:")
        self.put(f"    _bool_op_err({op!r}, {a}, {si})")
        return out

    def _call(self, node) -> str:
        args = [self.expr(a) for a in node.args]
        si = self.span(node.span)
        out = self.temp()
        name = node.name
        if name == "abs":
            a = args[0]
            self.put(f"if {a}.__class__ is int:")
            self.put(f"    {out} = {a} if {a} >= 0 else -{a}")
            self.put(f"    if {out} > {_INT_MAX}: _ovf({si})")
            self.put(f"elif {a}.__class__ is float: {out} = abs({a})")
            self.put(f"else: {out} = _b_abs([{a}], _st, _spans[{si}])")
            return out
        if name in ("min", "max") and len(args) == 2:
            a, b = args
            # keep the first argument unless the second strictly wins, which
            # matches the reference reduce (and its NaN behaviour)
            winner = f"{b} < {a}" if name == "min" else f"{a} < {b}"
            self.put(f"if {_NUM_CHECK.format(v=a)} and {_NUM_CHECK.format(v=b)}:")
            self.put(f"    {out} = {b} if {winner} else {a}")
            self.put(f"else: {out} = _b_{name}([{a}, {b}], _st, _spans[{si}])")
            return out
        if name == "floor":
            a = args[0]
            self.put(f"if {a}.__class__ is int: {out} = {a}")
            self.put(f"else: {out} = _b_floor([{a}], _st, _spans[{si}])")
            return out
        self.put(f"{out} = _b_{name}([{', '.join(args)}], _st, _spans[{si}])")
        return out

    # --- statements ---

    def stmt(self, node):
        t = type(node)
        if t is Let:
            atom = self.expr(node.value)
            self.put(f"v_{node.name} = {atom}")
            return
        if t is Return:
            atom = self.expr(node.value)
            self.put(f"return {atom}")
            return
        if t is If:
            cond = self.materialize(self.expr(node.cond))
            si = self.span(node.span)
            self.put(f"if {cond} is True:")
            self.indent += 1
            self.block(node.then)
            self.indent -= 1
            self.put(f"elif {cond} is not False: _if_err({cond}, {si})")
            if node.orelse is not None:
                self.put("else:")
                self.indent += 1
                self.block(node.orelse)
                self.indent -= 1
            return
        if t is For:
            seq = self.expr(node.iterable)
            si = self.span(node.span)
            items = self.temp()
            self.put(f"{items} = _iter_items({seq}, _spans[{si}])")
            self.put(f"_st.steps -= len({items}) + 1")
            self.put(f"if _st.steps < 0: _serr({si})")
            self.put(f"for v_{node.var} in {items}:")
            self.indent += 1
            self.block(node.body)
            self.indent -= 1
            return
        raise TypeError(f"unknown statement {t.__name__}")  # pragma: no cover

    def block(self, block: Block):
        if not block.stmts:
            self.put("pass")
            return
        cost = sum(_stmt_cost(s) for s in block.stmts)
        si = self.span(block.stmts[0].span)
        self.put(f"_st.steps -= {cost}")
        self.put(f"if _st.steps < 0: _serr({si})")
        for s in block.stmts:
            self.stmt(s)


def _make_namespace(spans: list[Span]) -> dict:
    def _raise(kind, message, si):
        span = spans[si]
        raise EvalError(kind, message, span.line, span.col)

    ns = {
        "_spans": spans,
        "_State": _State,
        "_iter_items": _iter_items_fast,
        "_in_seq": _in_seq,
        "_cmp_slow": _cmp_slow,
        "_eq": values_equal,
        "_ovf": lambda si: _raise("overflow", "integer result exceeds 64 bits", si),
        "_verr": lambda si: _raise("budget-exceeded", "value budget exhausted", si),
        "_serr": lambda si: _raise("budget-exceeded", "step budget exhausted", si),
        "_dbz": lambda what, si: _raise("division-by-zero", f"{what} by zero", si),
        "_arith_err": lambda op, a, b, si: _raise(
            "type-error",
            f"cannot apply {op} to {_type_name(a)} and {_type_name(b)}", si),
        "_bool_op_err": lambda op, v, si: _raise(
            "type-error", f"{op!r} needs booleans, got {_type_name(v)}", si),
        "_neg_err": lambda v, si: _raise(
            "type-error", f"cannot negate {_type_name(v)}", si),
        "_if_err": lambda v, si: _raise(
            "type-error", f"if condition must be boolean, got {_type_name(v)}", si),
        "_field_err": lambda o, name, si: _raise(
            "bad-field", f"{_type_name(o)} has no field {name!r}", si),
        "_key_missing": lambda k, si: _raise(
            "missing-key", f"key {k!r} not in mapping", si),
        "_key_bad": lambda k, si: _raise(
            "type-error", f"{_type_name(k)} is not a valid key", si),
        "_index_type": lambda k, si: _raise(
            "type-error", f"list index must be integer, got {_type_name(k)}", si),
        "_index_range": lambda k, si: _raise(
            "bad-index", f"index {k} out of range", si),
        "_not_indexable": lambda o, si: _raise(
            "type-error", f"cannot index {_type_name(o)}", si),
        "_in_err": lambda o, si: _raise(
            "type-error", f"cannot test membership in {_type_name(o)}", si),
    }
    for bname, impl in _BUILTIN_IMPL.items():
        ns[f"_b_{bname}"] = impl

    def _floordiv_mixed(a, b, span_idx):
        if b == 0:
            _raise("division-by-zero", "floor division by zero", span_idx)
        q = a / b
        if q != q or q in (math.inf, -math.inf):
            _raise("domain-error", "non-finite floor division", span_idx)
        r = math.floor(q)
        if r > _INT_MAX or r < _INT_MIN:
            _raise("overflow", "integer result exceeds 64 bits", span_idx)
        return r

    ns["_floordiv_mixed"] = _floordiv_mixed
    return ns


class TranspiledProgram:
    """Drop-in for interp.CompiledProgram, built from generated source."""

    __slots__ = ("params", "_fn", "_header_span")

    def __init__(self, fn: Function):
        self.params = fn.params
        self._header_span = fn.span
        emitter = _Emitter()
        header_si = emitter.span(fn.span)
        lines = ["def _scorer(_b, _st):"]
        for p in fn.params:
            lines.append("    try:")
            lines.append(f"        v_{p} = _b[{p!r}]")
            lines.append("    except KeyError:")
            lines.append(f"        _missing({p!r}, {header_si})")
        emitter.block(fn.body)
        lines.extend(emitter.lines)
        source = "\n".join(lines) + "\n    return None\n"
        ns = _make_namespace(emitter.spans)

        def _missing(name, si):
            span = emitter.spans[si]
            raise EvalError("missing-binding",
                            f"no binding for parameter {name!r}",
                            span.line, span.col)

        ns["_missing"] = _missing
        code = compile(source, "<scoring-program>", "exec")
        exec(code, ns)  # namespace is fully controlled; see module docstring
        self._fn = ns["_scorer"]

    def invoke(self, bindings, step_budget: int, value_budget: int):
        st = _State(step_budget, value_budget)
        value = self._fn(bindings, st)
        return value, step_budget - st.steps


def compile_fast(fn: Function) -> TranspiledProgram:
    return TranspiledProgram(fn)
