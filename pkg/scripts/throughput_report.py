#!/usr/bin/env python3
"""Measure candidate-evaluation throughput on small instances.

Informational only: prints evaluations per hour for each problem's base
scorer on a tiny instance, next to the reference search-throughput target
of roughly 10,500 evaluations per two hours.
"""
import time

from evoscore.problems import reference_program, registry_lookup
from evoscore.sandbox import Budget, run_candidate

TINY = {
    "toy": (b"3.0", "toy-base"),
    "rides2018": (b"3 4 1 1 2 10\n0 0 0 3 0 10\n", "rides2018-base"),
    "datacenter2015": (b"2 5 1 2 4\n0 2\n2 8\n1 1\n1 4\n2 6\n",
                       "datacenter2015-base"),
    "traffic2021": (b"10 3 2 1 5\n0 1 a 1\n1 2 b 3\n2 a b\n",
                    "traffic2021-base"),
    "fishing_ahc039": (b"3\n10 10\n20 20\n30 30\n15 15\n99999 99999\n"
                       b"99998 99998\n", "fishing-base"),
}


def main():
    budget = Budget(wall_clock_seconds=30.0)
    print("problem              evals/hour      evals/2h")
    for problem_name, (raw, seed_name) in TINY.items():
        handle = registry_lookup(problem_name)
        instance = handle.parse(raw, "tiny")
        program = reference_program(seed_name).program()
        n = 200
        started = time.monotonic()
        for _ in range(n):
            report = run_candidate(handle, instance, program, budget)
            assert report.is_score(), report.reason
        rate = n / (time.monotonic() - started)
        print(f"{problem_name:20s} {rate * 3600:12.0f}  {rate * 7200:12.0f}")
    print("\nreference target for a full search campaign: ~10500 "
          "evaluations per two hours (archive-sized inputs are far "
          "heavier than these tiny ones)")


if __name__ == "__main__":
    main()
