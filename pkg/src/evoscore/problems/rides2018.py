"""Self-driving ride dispatch (2018 qualification task).

A fleet of cars sits in a min-heap keyed by (free time, position).  The
earliest-free car asks the scoring program to pick an index into the live
list of remaining rides; an out-of-range index retires the car.  Scoring
is exact and on-the-fly: a ride pays its length when finished on time and
the per-ride bonus when picked up exactly at its earliest start, so no
separate evaluator pass is needed and the solution is the final score.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass

from ..limits import BoundScorer, CandidateRejected, RunLimits
from .base import ProblemHandle, instance_id_for, register


@dataclass(frozen=True)
class Ride:
    start: tuple[int, int]
    end: tuple[int, int]
    earliest_start: int
    latest_finish: int
    length: int  # Manhattan distance start -> end, precomputed for scorers


@dataclass(frozen=True)
class RidesInstance:
    instance_id: str
    grid_rows: int
    grid_cols: int
    fleet_size: int
    bonus: int
    total_time: int
    rides: tuple[Ride, ...]


def _distance(a: tuple[int, int], b: tuple[int, int]) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def parse_instance(data: bytes, instance_id: str | None = None) -> RidesInstance:
    lines = [ln for ln in data.decode("utf-8").split("\n") if ln.strip()]
    if not lines:
        raise ValueError("empty input")
    header = lines[0].split()
    if len(header) != 6:
        raise ValueError(f"header: expected 6 fields, got {len(header)}")
    rows, cols, fleet, n_rides, bonus, total_time = (int(x) for x in header)
    if fleet < 1 or total_time < 1 or n_rides < 0 or bonus < 0:
        raise ValueError("header values out of range")
    if len(lines) - 1 != n_rides:
        raise ValueError(f"expected {n_rides} ride lines, got {len(lines) - 1}")
    rides = []
    for i, line in enumerate(lines[1:]):
        parts = line.split()
        if len(parts) != 6:
            raise ValueError(f"ride {i}: expected 6 fields, got {len(parts)}")
        a, b, x, y, s, f = (int(p) for p in parts)
        if min(a, b, x, y) < 0:
            raise ValueError(f"ride {i}: negative coordinate")
        if s > f:
            raise ValueError(f"ride {i}: earliest start after latest finish")
        rides.append(Ride((a, b), (x, y), s, f, _distance((a, b), (x, y))))
    return RidesInstance(instance_id_for(data, instance_id),
                         rows, cols, fleet, bonus, total_time, tuple(rides))


def run_backbone(instance: RidesInstance, program,
                 limits: RunLimits | None = None) -> int:
    """Simulate the whole dispatch; returns the accumulated contest score.

    The scorer sees bindings (coords, time, rides) where rides is the live
    remaining list in original relative order.  A retired car is pushed
    back at total_time, so the loop ends once every car is past the
    horizon.
    """
    limits = limits or RunLimits()
    scorer = BoundScorer(program, limits)
    total_time = instance.total_time
    bonus = instance.bonus
    cars: list[tuple[int, tuple[int, int]]] = [(0, (0, 0))] * instance.fleet_size
    heapq.heapify(cars)
    rides = list(instance.rides)
    score = 0
    while True:
        limits.tick()
        time, coords = heapq.heappop(cars)
        if time >= total_time:
            break
        picked = scorer({"coords": coords, "time": time, "rides": rides})
        if type(picked) is not int:
            raise CandidateRejected("ride picker returned a non-integer")
        if picked < 0 or picked >= len(rides):
            heapq.heappush(cars, (total_time, coords))
            continue
        ride = rides.pop(picked)
        pickup_time = time + _distance(coords, ride.start)
        if pickup_time < ride.earliest_start:
            pickup_time = ride.earliest_start
        free_time = pickup_time + ride.length
        if free_time <= ride.latest_finish:
            score += ride.length
            if pickup_time == ride.earliest_start:
                score += bonus
        heapq.heappush(cars, (free_time, ride.end))
    return score


def evaluate(instance: RidesInstance, solution: int) -> int:
    # scoring happens during the simulation; the solution is the score
    return int(solution)


DESCRIBE = """\
Ride dispatch for a car fleet.  Cars live in a min-heap keyed by (time
they become free, position).  Each time a car is popped the scoring
function is called as

    score(coords, time, rides)

where coords is the car's (row, col), time its free time, and rides the
list of still-unassigned ride records in their original relative order.
Each ride record has fields start, end (both (row, col) pairs),
earliest_start, latest_finish and length (Manhattan start->end distance).
Return the index of the ride this car should take next; any out-of-range
index (e.g. -1) retires the car.  A ride pays length points if it finishes
by latest_finish, plus a fixed bonus if picked up exactly at
earliest_start.  Pickup time is max(earliest_start, time + distance from
coords to start).
"""

HANDLE = register(ProblemHandle(
    name="rides2018",
    parse=parse_instance,
    run_backbone=run_backbone,
    evaluate=evaluate,
    describe_backbone=DESCRIBE,
))
