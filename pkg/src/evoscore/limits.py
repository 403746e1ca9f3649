"""Cooperative run limits shared by backbones and the sandbox.

Backbones call ``limits.tick()`` once per outer loop iteration; that is
where wall-clock and coarse memory checks happen.  Inside a scoring call
the step/value budgets are the time and memory proxy, so the interpreter
itself never looks at the clock.
"""
from __future__ import annotations

import time

import psutil

from .lang import get_compiled

_MEMORY_CHECK_EVERY = 256


class SandboxTimeout(Exception):
    """Cooperative wall-clock deadline passed."""


class SandboxOverMemory(Exception):
    """Process memory exceeded the configured limit."""


class CandidateRejected(Exception):
    """The candidate misbehaved (bad scorer output, invalid move, ...)."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class RunLimits:
    """Deadline, memory cap and per-invocation scorer budgets for one run."""

    __slots__ = ("deadline", "memory_bytes", "step_budget", "value_budget",
                 "steps_used", "_ticks", "_proc")

    def __init__(self, wall_clock_seconds: float | None = None,
                 memory_bytes: int | None = None,
                 step_budget: int = 10_000_000,
                 value_budget: int = 1_000_000):
        self.deadline = (time.monotonic() + wall_clock_seconds
                         if wall_clock_seconds is not None else None)
        self.memory_bytes = memory_bytes
        self.step_budget = step_budget
        self.value_budget = value_budget
        self.steps_used = 0
        self._ticks = 0
        self._proc = psutil.Process() if memory_bytes is not None else None

    def tick(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise SandboxTimeout("wall-clock limit exceeded")
        self._ticks += 1
        if self._proc is not None and self._ticks % _MEMORY_CHECK_EVERY == 0:
            if self._proc.memory_info().rss > self.memory_bytes:
                raise SandboxOverMemory("process memory over limit")


class BoundScorer:
    """A compiled scoring program tied to one run's limits.

    Each call applies the per-invocation budgets and accumulates the steps
    consumed into the RunLimits.
    """

    __slots__ = ("_compiled", "_limits")

    def __init__(self, program, limits: RunLimits):
        self._compiled = get_compiled(program)
        self._limits = limits

    def __call__(self, bindings: dict):
        limits = self._limits
        value, used = self._compiled.invoke(bindings, limits.step_budget,
                                            limits.value_budget)
        limits.steps_used += used
        return value


def require_int(value, what: str) -> int:
    """Reject a scorer result that is not a plain integer."""
    if type(value) is not int:
        raise CandidateRejected(f"{what} returned {_kind(value)}, expected integer")
    return value


def require_number(value, what: str):
    """Reject a scorer result that is not int or real."""
    if type(value) is int or type(value) is float:
        return value
    raise CandidateRejected(f"{what} returned {_kind(value)}, expected a number")


def _kind(value) -> str:
    if value is None:
        return "none"
    if type(value) is bool:
        return "boolean"
    return type(value).__name__


__all__ = [
    "BoundScorer",
    "CandidateRejected",
    "RunLimits",
    "SandboxOverMemory",
    "SandboxTimeout",
    "require_int",
    "require_number",
]
