"""Shared fixtures: tiny instances, reference programs, archive lookup."""
from __future__ import annotations

import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from evoscore.lang import parse
from evoscore.problems import registry_lookup

ARCHIVE_ENV = "EVOSCORE_DATA"


def archive_path(filename: str) -> Path | None:
    """Locate a contest archive input, or None (tests then skip)."""
    roots = []
    if os.environ.get(ARCHIVE_ENV):
        roots.append(Path(os.environ[ARCHIVE_ENV]))
    roots.append(Path(__file__).resolve().parent.parent / "data" / "archive")
    for root in roots:
        for candidate in (root / filename, root / (filename + ".txt"),
                          root / (filename + ".in")):
            if candidate.exists():
                return candidate
    return None


TINY_RIDES = b"3 4 1 1 2 10\n0 0 0 3 0 10\n"

TINY_DATACENTER = b"2 5 1 2 4\n0 2\n2 8\n1 1\n1 4\n2 6\n"

# one car over streets a (len 1) then b (len 3); b is final so only a is used
TINY_TRAFFIC = b"10 3 2 1 5\n0 1 a 1\n1 2 b 3\n2 a b\n"

TINY_TRAFFIC_TWO_IN = (
    b"20 4 4 2 5\n"
    b"0 2 a 1\n"
    b"1 2 b 2\n"
    b"2 3 c 2\n"
    b"2 3 d 2\n"
    b"2 a c\n"
    b"2 b d\n"
)

TINY_FISH = (
    b"3\n"
    b"10 10\n20 20\n30 30\n"
    b"15 15\n99999 99999\n99998 99998\n"
)

TINY_TOY = b"3.0"


@pytest.fixture
def rides_tiny():
    return registry_lookup("rides2018").parse(TINY_RIDES, "tiny")


@pytest.fixture
def datacenter_tiny():
    return registry_lookup("datacenter2015").parse(TINY_DATACENTER, "tiny")


@pytest.fixture
def traffic_tiny():
    return registry_lookup("traffic2021").parse(TINY_TRAFFIC, "tiny")


@pytest.fixture
def fish_tiny():
    return registry_lookup("fishing_ahc039").parse(TINY_FISH, "tiny")


@pytest.fixture
def toy_tiny():
    return registry_lookup("toy").parse(TINY_TOY, "tiny")


@pytest.fixture
def constant_one():
    return parse("fn score(x) { return 1; }")
