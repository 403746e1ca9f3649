"""ScoringProgram: the parsed, canonicalised unit of selection."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .nodes import Function
from .parser import parse_source
from .render import render_function


@dataclass(frozen=True)
class ScoringProgram:
    source: str  # canonical text; parse(source).ast == ast
    ast: Function
    id: str  # content hash of the canonical source


def program_from_ast(ast: Function) -> ScoringProgram:
    source = render_function(ast)
    digest = hashlib.sha256(source.encode("utf-8")).hexdigest()[:16]
    return ScoringProgram(source, ast, digest)


def parse(source: str) -> ScoringProgram:
    """Parse source text into a ScoringProgram with canonical formatting."""
    return program_from_ast(parse_source(source))


def render(program: ScoringProgram | Function) -> str:
    """Canonical text of a program; parse(render(p)) round-trips the AST."""
    if isinstance(program, ScoringProgram):
        return program.source
    return render_function(program)
