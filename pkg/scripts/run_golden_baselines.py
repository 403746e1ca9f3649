#!/usr/bin/env python3
"""Check the pinned contest scores against the public archive inputs.

The input files are not redistributed with this package; download them
from the public contest archive and point --data at the directory (or set
EVOSCORE_DATA).  Expected files:

    hashcode_2015_qualification_round.txt
    d_metropolis.in
    f_forever_jammed.in

For every shipped reference scorer with a pinned score, this prints the
measured score, the expectation and the runtime.
"""
import argparse
import os
import sys
import time
from pathlib import Path

from evoscore.problems import load_reference_programs, fitness, registry_lookup

FILES = {
    "datacenter2015": "hashcode_2015_qualification_round",
    "rides2018": "d_metropolis",
    "traffic2021": "f_forever_jammed",
}


def find_input(root: Path, stem: str) -> Path | None:
    for candidate in (root / stem, root / f"{stem}.txt", root / f"{stem}.in"):
        if candidate.exists():
            return candidate
    return None


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--data", default=os.environ.get("EVOSCORE_DATA",
                                                         "data/archive"))
    args = parser.parse_args()
    root = Path(args.data)
    failures = 0
    checked = 0
    for ref in load_reference_programs():
        if not ref.expected_scores:
            continue
        for instance_stem, expected in ref.expected_scores.items():
            path = find_input(root, instance_stem)
            if path is None:
                print(f"SKIP {ref.name}: {instance_stem} not found under {root}")
                continue
            handle = registry_lookup(ref.problem)
            instance = handle.parse(path.read_bytes(), instance_stem)
            started = time.monotonic()
            got = fitness(handle, instance, ref.program())
            elapsed = time.monotonic() - started
            ok = got == expected
            checked += 1
            failures += 0 if ok else 1
            print(f"{'OK  ' if ok else 'FAIL'} {ref.name}: {got} "
                  f"(expected {expected}) in {elapsed:.1f}s")
    if checked == 0:
        print("no archive inputs found; nothing checked")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
