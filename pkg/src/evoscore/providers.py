"""Mutation providers: where new candidate programs come from.

A provider receives the backbone description plus the k selected parent
programs ordered worst to best, and returns candidate program texts.  The
builtin provider applies seeded genetic operators to the best parent; the
remote provider speaks a small HTTP protocol so an external code-writing
service can be plugged in without touching the search loop.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from importlib import resources

import requests

from .lang import MUTATION_KINDS, MutationError, MutationOp, NoApplicableSite, mutate, parse


class ProviderUnavailableError(Exception):
    """The remote mutation endpoint could not produce candidates."""


class BuiltinGPProvider:
    """Seeded genetic-programming mutator; fully deterministic."""

    name = "builtin-gp"

    def __init__(self, rng_seed: int = 0, max_tries: int = 8):
        self._rng = random.Random(rng_seed)
        self._max_tries = max_tries

    def propose(self, backbone: str, parents: list[str], n: int = 1) -> list[str]:
        if not parents:
            raise ValueError("at least one parent program is required")
        parsed = [parse(p) for p in parents]
        base = parsed[-1]  # parents arrive worst -> best
        out = []
        for _ in range(n):
            source = None
            for _ in range(self._max_tries):
                kind = self._rng.choice(MUTATION_KINDS)
                op = MutationOp(kind, self._rng.getrandbits(32))
                try:
                    source = mutate(base, parsed, op).source
                    break
                except (NoApplicableSite, MutationError, ValueError):
                    continue
            out.append(source if source is not None else base.source)
        return out


_PROMPT_ASSET = "prompt_template_v1.txt"


def load_prompt_template() -> str:
    return (resources.files("evoscore") / "assets" / _PROMPT_ASSET).read_text("utf-8")


def render_prompt(backbone: str, parents: list[str]) -> str:
    """Fill the versioned prompt template with backbone text and parents
    (worst to best), for services that want a single flat prompt."""
    blocks = []
    for rank, source in enumerate(parents):
        blocks.append(f"--- parent {rank} (better ranks follow) ---\n{source.rstrip()}")
    return load_prompt_template().format(
        backbone=backbone.rstrip(),
        parents_block="\n".join(blocks),
    )


@dataclass
class RemoteLLMProvider:
    """HTTP mutation endpoint: POST {endpoint}/mutate.

    Request JSON: {"backbone": text, "parents": [text...], "n": int}
    Response JSON: {"candidates": [text...]}
    """

    endpoint: str
    auth_token: str | None = None
    timeout_seconds: float = 60.0
    name = "remote-llm"

    def propose(self, backbone: str, parents: list[str], n: int = 1) -> list[str]:
        headers = {"Content-Type": "application/json"}
        if self.auth_token:
            headers["Authorization"] = f"Bearer {self.auth_token}"
        url = self.endpoint.rstrip("/") + "/mutate"
        try:
            response = requests.post(
                url,
                json={"backbone": backbone, "parents": parents, "n": n},
                headers=headers,
                timeout=self.timeout_seconds,
            )
        except requests.RequestException as exc:
            raise ProviderUnavailableError(f"POST {url} failed: {exc}") from exc
        if response.status_code != 200:
            raise ProviderUnavailableError(
                f"POST {url} returned HTTP {response.status_code}")
        try:
            candidates = response.json()["candidates"]
        except (ValueError, KeyError) as exc:
            raise ProviderUnavailableError(f"bad response payload: {exc}") from exc
        if not isinstance(candidates, list) or not all(isinstance(c, str) for c in candidates):
            raise ProviderUnavailableError("candidates must be a list of program texts")
        if not candidates:
            raise ProviderUnavailableError("endpoint returned no candidates")
        return candidates
