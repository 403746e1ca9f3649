"""Contest problem modules and the shared registry."""

from .base import (
    ProblemHandle, ProblemNotFoundError, ReferenceProgram, fitness,
    list_problems, load_reference_programs, reference_program,
    registry_lookup,
)

# importing the modules registers their handles
from . import datacenter2015, fishing_ahc039, rides2018, toy, traffic2021  # noqa: E402,F401

__all__ = [
    "ProblemHandle",
    "ProblemNotFoundError",
    "ReferenceProgram",
    "datacenter2015",
    "fishing_ahc039",
    "fitness",
    "list_problems",
    "load_reference_programs",
    "reference_program",
    "registry_lookup",
    "rides2018",
    "toy",
    "traffic2021",
]
