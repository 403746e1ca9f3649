"""Uniform problem interface, registry and reference-program library."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Callable

from ..lang import parse
from ..limits import RunLimits


class ProblemNotFoundError(KeyError):
    pass


@dataclass(frozen=True)
class ProblemHandle:
    """One contest task: parser, greedy backbone and exact evaluator.

    ``evaluate`` is a pure function of (instance, solution).  The backbone
    only talks to the scoring program through the bindings documented in
    ``describe_backbone``, which is also the text shown to mutation
    providers.
    """

    name: str
    parse: Callable[..., Any]
    run_backbone: Callable[..., Any]
    evaluate: Callable[[Any, Any], int]
    describe_backbone: str


_REGISTRY: dict[str, ProblemHandle] = {}


def register(handle: ProblemHandle) -> ProblemHandle:
    _REGISTRY[handle.name] = handle
    return handle


def registry_lookup(name: str) -> ProblemHandle:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ProblemNotFoundError(name) from None


def list_problems() -> list[str]:
    return sorted(_REGISTRY)


def fitness(handle: ProblemHandle, instance, program,
            limits: RunLimits | None = None) -> int:
    """Exact contest score of the solution the backbone produces.

    Scorer misbehaviour raises CandidateRejected / EvalError; callers that
    need an outcome instead of an exception go through the sandbox.
    """
    solution = handle.run_backbone(instance, program, limits)
    return handle.evaluate(instance, solution)


def instance_id_for(data: bytes, explicit: str | None) -> str:
    if explicit:
        return explicit
    return "sha1:" + hashlib.sha1(data).hexdigest()[:12]


# --- reference program library ---

@dataclass(frozen=True)
class ReferenceProgram:
    name: str
    problem: str
    source: str
    provenance: str
    expected_scores: dict[str, int] = field(default_factory=dict)
    requires_archive_input: bool = True

    def program(self):
        return parse(self.source)


def _assets_root():
    return resources.files("evoscore") / "assets"


def load_reference_programs() -> list[ReferenceProgram]:
    """Load the shipped scorer library from the versioned assets directory."""
    root = _assets_root()
    manifest = json.loads((root / "manifest.json").read_text("utf-8"))
    out = []
    for entry in manifest["programs"]:
        source = (root / entry["file"]).read_text("utf-8")
        out.append(ReferenceProgram(
            name=entry["name"],
            problem=entry["problem"],
            source=source,
            provenance=entry["provenance"],
            expected_scores={k: int(v) for k, v in entry.get("expected_scores", {}).items()},
            requires_archive_input=bool(entry.get("requires_archive_input", True)),
        ))
    return out


def reference_program(name: str) -> ReferenceProgram:
    for ref in load_reference_programs():
        if ref.name == name:
            return ref
    raise KeyError(name)
