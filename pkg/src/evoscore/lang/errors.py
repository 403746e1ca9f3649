"""Error types raised by the scoring language.

Every error carries the source position it was raised at.  Parse and
runtime failures are ordinary exceptions on the host side; the sandbox
turns them into candidate rejections rather than letting them escape.
"""
from __future__ import annotations


class LangError(Exception):
    """Base class for all scoring-language failures."""

    def __init__(self, kind: str, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{kind} at {line}:{col}: {message}")
        self.kind = kind
        self.message = message
        self.line = line
        self.col = col


class ParseError(LangError):
    """Syntax, undeclared-identifier, or builtin-arity failure."""


class EvalError(LangError):
    """Runtime failure inside a scoring program (recoverable signal)."""
