"""Traffic-light scheduling (2021 qualification task).

The backbone builds a light schedule in three phases:

1. simulate with every green duration = 1; the first time a car queues on
   a used, still-unscheduled street the scorer picks that street's slot in
   its intersection's rotation (result mod slot count, then a wrapping
   linear probe to the next free slot);
2. used streets no car reached get slots the same way at time = deadline;
3. the scorer is asked once per slot for its green duration.

Streets that only carry cars which cannot finish are pruned before the
final scoring simulation.

Tick convention (frozen by the hand-simulated tests): within one tick the
order is schedule -> release -> move -> light advance; a car released at
tick t starts moving at tick t+1, and any queue join (including the
initial placement at tick 0) becomes releasable the following tick.  A car
arriving at the end of its final street at tick t earns
bonus + (deadline - t - 1).  The "immediate" convention (release at tick 0
and same-tick movement) is kept behind a flag for baseline sweeps.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from ..limits import BoundScorer, CandidateRejected, RunLimits
from .base import ProblemHandle, instance_id_for, register

Schedule = dict[int, tuple[tuple["Street", int], ...]]


@dataclass(frozen=True)
class Street:
    name: str
    length: int
    start_id: int
    end_id: int


@dataclass(frozen=True)
class Car:
    index: int
    route: tuple[Street, ...]


@dataclass(frozen=True)
class Intersection:
    index: int
    roads_in: tuple[Street, ...]
    roads_out: tuple[Street, ...]


@dataclass(frozen=True)
class TrafficInstance:
    instance_id: str
    deadline: int
    bonus: int
    intersections: tuple[Intersection, ...]
    streets: dict[str, Street]
    cars: tuple[Car, ...]


class InvalidScheduleError(ValueError):
    pass


def parse_instance(data: bytes, instance_id: str | None = None) -> TrafficInstance:
    lines = [ln for ln in data.decode("utf-8").split("\n") if ln.strip()]
    if not lines:
        raise ValueError("empty input")
    header = lines[0].split()
    if len(header) != 5:
        raise ValueError(f"header: expected 5 fields, got {len(header)}")
    deadline, n_inter, n_streets, n_cars, bonus = (int(x) for x in header)
    if deadline < 1 or n_inter < 1 or n_streets < 0 or n_cars < 0 or bonus < 0:
        raise ValueError("header values out of range")
    if len(lines) != 1 + n_streets + n_cars:
        raise ValueError("line count does not match header")
    streets: dict[str, Street] = {}
    for i in range(n_streets):
        parts = lines[1 + i].split()
        if len(parts) != 4:
            raise ValueError(f"street {i}: expected 4 fields")
        start_id, end_id, name, length = int(parts[0]), int(parts[1]), parts[2], int(parts[3])
        if not (0 <= start_id < n_inter and 0 <= end_id < n_inter):
            raise ValueError(f"street {name!r}: endpoint out of range")
        if length < 1:
            raise ValueError(f"street {name!r}: length must be >= 1")
        if name in streets:
            raise ValueError(f"duplicate street name {name!r}")
        streets[name] = Street(name, length, start_id, end_id)
    cars = []
    for i in range(n_cars):
        parts = lines[1 + n_streets + i].split()
        count = int(parts[0])
        if count < 1 or len(parts) != count + 1:
            raise ValueError(f"car {i}: malformed route")
        route = []
        for name in parts[1:]:
            if name not in streets:
                raise ValueError(f"car {i}: unknown street {name!r}")
            route.append(streets[name])
        cars.append(Car(i, tuple(route)))
    roads_in: list[list[Street]] = [[] for _ in range(n_inter)]
    roads_out: list[list[Street]] = [[] for _ in range(n_inter)]
    for street in streets.values():
        roads_in[street.end_id].append(street)
        roads_out[street.start_id].append(street)
    intersections = tuple(Intersection(i, tuple(roads_in[i]), tuple(roads_out[i]))
                          for i in range(n_inter))
    return TrafficInstance(instance_id_for(data, instance_id), deadline, bonus,
                           intersections, streets, tuple(cars))


def used_street_counts(instance: TrafficInstance) -> dict[str, int]:
    """Route occurrences per street, skipping each route's final street and
    cars whose free-flow travel time (first street excluded) beats the
    deadline."""
    counts: dict[str, int] = {}
    for car in instance.cars:
        travel = 0
        for street in car.route[1:]:
            travel += street.length
        if travel > instance.deadline:
            continue
        for street in car.route[:-1]:
            counts[street.name] = counts.get(street.name, 0) + 1
    return counts


def _simulate(instance: TrafficInstance, slots: list[list], *,
              schedule_hook=None, on_join=None, convention: str = "delayed",
              limits: RunLimits | None = None) -> tuple[int, set[int]]:
    """Core tick loop shared by phase 1 and final scoring.

    ``slots`` maps intersection id -> list of (street, duration) or None
    entries; a phase-1 ``schedule_hook(t)`` may fill None entries as the
    simulation runs, and ``on_join(street)`` observes every queue join.
    Returns (score, finished car indices).
    """
    if convention not in ("delayed", "immediate"):
        raise ValueError(f"unknown tick convention {convention!r}")
    deadline = instance.deadline
    bonus = instance.bonus
    cars = instance.cars
    queues: dict[str, deque[int]] = {}
    curr_road = [0] * len(cars)
    travel = [0] * len(cars)
    moving: set[int] = set()
    finished: set[int] = set()
    score = 0
    with_slots = [i for i, s in enumerate(slots) if s]
    curr_index = {i: 0 for i in with_slots}
    timer = {}
    for i in with_slots:
        slot = slots[i][0]
        timer[i] = slot[1] if slot is not None else 1

    def join_queue(car_id: int, street: Street):
        q = queues.get(street.name)
        if q is None:
            q = queues[street.name] = deque()
        q.append(car_id)
        if on_join is not None:
            on_join(street)

    def initial_joins():
        for car in cars:
            join_queue(car.index, car.route[0])

    if convention == "immediate":
        initial_joins()

    for t in range(deadline):
        if limits is not None:
            limits.tick()
        if schedule_hook is not None:
            schedule_hook(t)
        # release: one car crosses per intersection showing a green light
        newly_moving = []
        for i in with_slots:
            slot = slots[i][curr_index[i]]
            if slot is None:
                continue
            q = queues.get(slot[0].name)
            if q:
                car_id = q.popleft()
                route = cars[car_id].route
                if curr_road[car_id] == len(route) - 1:
                    # degenerate single-street route: crossing finishes it
                    finished.add(car_id)
                    score += bonus + (deadline - t - 1)
                    continue
                curr_road[car_id] += 1
                travel[car_id] = route[curr_road[car_id]].length
                newly_moving.append(car_id)
        if convention == "immediate":
            moving.update(newly_moving)
            newly_moving = []
        # move
        if t == 0 and convention == "delayed":
            initial_joins()
        for car_id in sorted(moving):
            travel[car_id] -= 1
            if travel[car_id] == 0:
                moving.discard(car_id)
                route = cars[car_id].route
                if curr_road[car_id] == len(route) - 1:
                    finished.add(car_id)
                    score += bonus + (deadline - t - 1)
                else:
                    join_queue(car_id, route[curr_road[car_id]])
        moving.update(newly_moving)
        # advance lights
        for i in with_slots:
            timer[i] -= 1
            if timer[i] == 0:
                curr_index[i] = (curr_index[i] + 1) % len(slots[i])
                slot = slots[i][curr_index[i]]
                timer[i] = slot[1] if slot is not None else 1
    return score, finished


def build_schedule(instance: TrafficInstance, program,
                   limits: RunLimits | None = None,
                   convention: str = "delayed") -> Schedule:
    """Three-phase schedule construction driven by the scoring program."""
    limits = limits or RunLimits()
    scorer = BoundScorer(program, limits)
    used = used_street_counts(instance)
    n_inter = len(instance.intersections)
    slots: list[list] = [[] for _ in range(n_inter)]
    for name in used:
        slots[instance.streets[name].end_id].append(None)
    open_streets = set(used)
    pending: dict[str, bool] = {}

    def ask_position(street: Street, t: int) -> int:
        i = street.end_id
        size = len(slots[i])
        result = scorer({"street": street, "cars": instance.cars,
                         "intersections": instance.intersections,
                         "used_streets": used, "bonus": instance.bonus,
                         "time": t, "curr_size": size, "give_pos": True})
        if type(result) is not int:
            raise CandidateRejected("position scorer returned a non-integer")
        pos = result % size
        while slots[i][pos] is not None:
            pos = (pos + 1) % size
        return pos

    def place(street: Street, t: int):
        slots[street.end_id][ask_position(street, t)] = (street, 1)
        open_streets.discard(street.name)
        pending.pop(street.name, None)

    def schedule_hook(t: int):
        for name in list(pending):
            place(instance.streets[name], t)

    def on_join(street: Street):
        if street.name in open_streets and street.name not in pending:
            pending[street.name] = True

    # phase 1: schedule streets as cars first queue on them
    _simulate(instance, slots, schedule_hook=schedule_hook, on_join=on_join,
              convention=convention, limits=limits)

    # phase 2: any used street no car reached is scheduled at the deadline
    for name in used:
        if name in open_streets:
            place(instance.streets[name], instance.deadline)

    # phase 3: green durations per slot
    schedule: Schedule = {}
    for i in range(n_inter):
        if not slots[i]:
            continue
        entries = []
        size = len(slots[i])
        for pos in range(size):
            street = slots[i][pos][0]
            result = scorer({"street": street, "cars": instance.cars,
                             "intersections": instance.intersections,
                             "used_streets": used, "bonus": instance.bonus,
                             "time": instance.deadline, "curr_size": size,
                             "give_pos": False})
            if type(result) is not int:
                raise CandidateRejected("duration scorer returned a non-integer")
            if result < 1:
                raise CandidateRejected(f"duration scorer returned {result} (< 1)")
            entries.append((street, result))
        schedule[i] = tuple(entries)
    return schedule


def _validate_schedule(instance: TrafficInstance, schedule: Schedule):
    for i, entries in schedule.items():
        if i < 0 or i >= len(instance.intersections):
            raise InvalidScheduleError(f"unknown intersection {i}")
        seen = set()
        for street, duration in entries:
            known = instance.streets.get(street.name)
            if known is None or known != street:
                raise InvalidScheduleError(f"foreign street {street.name!r}")
            if street.end_id != i:
                raise InvalidScheduleError(
                    f"street {street.name!r} does not enter intersection {i}")
            if street.name in seen:
                raise InvalidScheduleError(f"duplicate street {street.name!r}")
            if duration < 1:
                raise InvalidScheduleError(
                    f"street {street.name!r}: duration {duration} < 1")
            seen.add(street.name)


def _slots_from_schedule(instance: TrafficInstance, schedule: Schedule) -> list[list]:
    slots: list[list] = [[] for _ in range(len(instance.intersections))]
    for i, entries in schedule.items():
        slots[i] = list(entries)
    return slots


def simulate_and_score(instance: TrafficInstance, schedule: Schedule,
                       convention: str = "delayed",
                       limits: RunLimits | None = None) -> int:
    """Exact contest score of a schedule (validates it first)."""
    _validate_schedule(instance, schedule)
    score, _ = _simulate(instance, _slots_from_schedule(instance, schedule),
                         convention=convention, limits=limits)
    return score


def prune_failed_streets(instance: TrafficInstance, schedule: Schedule,
                         convention: str = "delayed",
                         limits: RunLimits | None = None) -> Schedule:
    """Drop schedule entries for streets used only by cars that cannot
    finish under this schedule (their lights stay red)."""
    _validate_schedule(instance, schedule)
    _, finished = _simulate(instance, _slots_from_schedule(instance, schedule),
                            convention=convention, limits=limits)
    still_used: set[str] = set()
    for car in instance.cars:
        if car.index in finished:
            for street in car.route[:-1]:
                still_used.add(street.name)
    pruned: Schedule = {}
    for i, entries in schedule.items():
        kept = tuple(e for e in entries if e[0].name in still_used)
        if kept:
            pruned[i] = kept
    return pruned


def run_backbone(instance: TrafficInstance, program,
                 limits: RunLimits | None = None,
                 convention: str = "delayed") -> Schedule:
    limits = limits or RunLimits()
    schedule = build_schedule(instance, program, limits, convention)
    return prune_failed_streets(instance, schedule, convention, limits)


def schedule_to_submission(schedule: Schedule) -> str:
    lines = [str(len(schedule))]
    for i in sorted(schedule):
        entries = schedule[i]
        lines.append(str(i))
        lines.append(str(len(entries)))
        for street, duration in entries:
            lines.append(f"{street.name} {duration}")
    return "\n".join(lines) + "\n"


DESCRIBE = """\
Traffic-light scheduling.  One scoring function covers two choice points,
switched by give_pos:

    score(street, cars, intersections, used_streets, bonus, time,
          curr_size, give_pos)

give_pos = true: return an integer slot position for this street in its
end intersection's green-light rotation (taken modulo the slot count,
then probed upward to the first free slot).  Asked the first time a car
queues on the street during a unit-duration simulation, or at the
deadline for used streets no car reached.

give_pos = false: return an integer green duration (>= 1) for the street's
slot.  curr_size is the slot count of the intersection; used_streets maps
street name -> number of route occurrences by finishable cars (final
street excluded); street has fields name, length, start_id, end_id.
Cars finishing their route at tick t earn bonus + (deadline - t - 1).
"""

HANDLE = register(ProblemHandle(
    name="traffic2021",
    parse=parse_instance,
    run_backbone=run_backbone,
    evaluate=simulate_and_score,
    describe_backbone=DESCRIBE,
))
