"""Toy one-dimensional landscape for fast, deterministic evolution tests.

The instance is a single target value; the scoring program is called once
and its numeric output v earns floor(scale / (1 + |v - target|)) points.
A constant seed program can always be improved by re-tuning its constant,
which makes this problem a sub-second end-to-end check of the search loop.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..limits import RunLimits, BoundScorer, require_number
from .base import ProblemHandle, instance_id_for, register


@dataclass(frozen=True)
class ToyInstance:
    instance_id: str
    target: float
    scale: int = 10_000


def parse_instance(data: bytes, instance_id: str | None = None) -> ToyInstance:
    text = data.decode("utf-8").split()
    if not text or len(text) > 2:
        raise ValueError("toy instance is 'target [scale]'")
    target = float(text[0])
    scale = int(text[1]) if len(text) == 2 else 10_000
    if scale <= 0:
        raise ValueError("scale must be positive")
    return ToyInstance(instance_id_for(data, instance_id), target, scale)


def run_backbone(instance: ToyInstance, program,
                 limits: RunLimits | None = None) -> float:
    limits = limits or RunLimits()
    limits.tick()
    scorer = BoundScorer(program, limits)
    value = require_number(scorer({"x": 0.0}), "toy scorer")
    return float(value)


def evaluate(instance: ToyInstance, solution: float) -> int:
    return int(instance.scale / (1.0 + abs(solution - instance.target)))


DESCRIBE = """\
Tunable-constant landscape.  The scoring function is invoked once as
score(x) with x bound to 0.0; its numeric return value v earns
floor(scale / (1 + |v - target|)) points, so returning a constant closer
to the hidden target scores higher.
"""

HANDLE = register(ProblemHandle(
    name="toy",
    parse=parse_instance,
    run_backbone=run_backbone,
    evaluate=evaluate,
    describe_backbone=DESCRIBE,
))
