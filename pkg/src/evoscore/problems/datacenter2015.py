"""Data-center server placement (2015 qualification task).

Two-phase greedy: servers are placed left-to-right while cycling through
rows in ascending id (promoting an even spread), then each placed server
is assigned to the pool its scorer rates highest.  The objective is the
guaranteed capacity: the minimum over pools of (total capacity minus the
largest single-row contribution), i.e. what survives the worst row loss.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..limits import BoundScorer, RunLimits, require_number
from .base import ProblemHandle, instance_id_for, register

UNPOOLED = -1


@dataclass(frozen=True)
class Server:
    index: int
    size: int
    capacity: int


@dataclass(frozen=True)
class DataCenterInstance:
    instance_id: str
    n_rows: int
    n_slots: int
    n_pools: int
    # per row: ascending blocked-slot positions with a final n_slots sentinel
    row_blocks: tuple[tuple[int, ...], ...]
    servers: tuple[Server, ...]


class InvalidPlacementError(ValueError):
    def __init__(self, server_index: int, message: str):
        super().__init__(f"server {server_index}: {message}")
        self.server_index = server_index


def parse_instance(data: bytes, instance_id: str | None = None) -> DataCenterInstance:
    lines = data.decode("utf-8").split("\n")
    pos = 0

    def next_ints(n: int, what: str) -> list[int]:
        nonlocal pos
        while pos < len(lines) and not lines[pos].strip():
            pos += 1
        if pos >= len(lines):
            raise ValueError(f"unexpected end of input reading {what}")
        parts = lines[pos].split()
        pos += 1
        if len(parts) != n:
            raise ValueError(f"{what}: expected {n} fields, got {len(parts)}")
        try:
            return [int(p) for p in parts]
        except ValueError:
            raise ValueError(f"{what}: non-integer field") from None

    n_rows, n_slots, n_unavail, n_pools, n_servers = next_ints(5, "header")
    if min(n_rows, n_slots, n_pools) < 1 or n_unavail < 0 or n_servers < 0:
        raise ValueError("header values out of range")
    blocks: list[list[int]] = [[] for _ in range(n_rows)]
    for i in range(n_unavail):
        r, s = next_ints(2, f"blocked slot {i}")
        if not (0 <= r < n_rows and 0 <= s < n_slots):
            raise ValueError(f"blocked slot {i} out of range: ({r}, {s})")
        if s in blocks[r]:
            raise ValueError(f"duplicate blocked slot ({r}, {s})")
        blocks[r].append(s)
    servers = []
    for i in range(n_servers):
        size, capacity = next_ints(2, f"server {i}")
        if size < 1 or capacity < 1:
            raise ValueError(f"server {i}: size and capacity must be >= 1")
        servers.append(Server(i, size, capacity))
    row_blocks = tuple(tuple(sorted(b + [n_slots])) for b in blocks)
    return DataCenterInstance(instance_id_for(data, instance_id),
                              n_rows, n_slots, n_pools, row_blocks,
                              tuple(servers))


def place_servers(instance: DataCenterInstance, program,
                  limits: RunLimits | None = None) -> dict[int, tuple[int, int, int]]:
    """Phase 1: choose a row segment for each server.

    Rows are visited in ascending id per sweep; within a segment the open
    server with the strictly highest scorer value wins (first seen keeps
    ties).  Returns server index -> (row, slot, UNPOOLED); servers that
    never fit stay unplaced.
    """
    limits = limits or RunLimits()
    scorer = BoundScorer(program, limits)
    n_rows = instance.n_rows
    n_slots = instance.n_slots
    servers = instance.servers
    curr_ind = [0] * n_rows
    curr_block = [0] * n_rows
    open_rows = set(range(n_rows))
    open_flag = [True] * len(servers)
    n_open_servers = len(servers)
    placement: dict[int, tuple[int, int, int]] = {}
    while open_rows and n_open_servers:
        limits.tick()
        for row in sorted(open_rows):
            if not n_open_servers:
                break
            row_b = instance.row_blocks[row]
            while curr_ind[row] == row_b[curr_block[row]]:
                curr_ind[row] += 1
                curr_block[row] += 1
                if curr_ind[row] >= n_slots:
                    open_rows.remove(row)
                    break
            if row not in open_rows:
                continue
            next_pos = row_b[curr_block[row]]
            best_server = None
            best_score = None
            base = curr_ind[row]
            for s_id in range(len(servers)):
                if open_flag[s_id] and base + servers[s_id].size <= next_pos:
                    value = require_number(
                        scorer({"server": servers[s_id], "row": row,
                                "pool": None, "pools_per_row": None,
                                "rate_server": True}),
                        "placement scorer")
                    if best_server is None or value > best_score:
                        best_score = value
                        best_server = s_id
            if best_server is None:
                curr_ind[row] = next_pos
                if curr_ind[row] >= n_slots:
                    open_rows.remove(row)
            else:
                placement[best_server] = (row, curr_ind[row], UNPOOLED)
                curr_ind[row] += servers[best_server].size
                open_flag[best_server] = False
                n_open_servers -= 1
    return placement


def assign_pools(instance: DataCenterInstance,
                 placement: dict[int, tuple[int, int, int]], program,
                 limits: RunLimits | None = None,
                 order: str = "index") -> dict[int, tuple[int, int, int]]:
    """Phase 2: pick a pool for every placed server.

    Servers are visited in ascending index ("index") or in placement order
    ("placement"); pools are compared with strictly-greater replacement so
    the lowest pool id wins ties.  pools_per_row is updated with the
    server's capacity after each assignment and is visible to later calls.
    """
    limits = limits or RunLimits()
    scorer = BoundScorer(program, limits)
    pools_per_row = {row: {p: 0 for p in range(instance.n_pools)}
                     for row in range(instance.n_rows)}
    if order == "index":
        server_ids = sorted(placement)
    elif order == "placement":
        server_ids = list(placement)
    else:
        raise ValueError(f"unknown order {order!r}")
    out: dict[int, tuple[int, int, int]] = {}
    for s_id in server_ids:
        limits.tick()
        row, col, _ = placement[s_id]
        server = instance.servers[s_id]
        best_pool = None
        best_score = None
        for p in range(instance.n_pools):
            value = require_number(
                scorer({"server": server, "row": row, "pool": p,
                        "pools_per_row": pools_per_row,
                        "rate_server": False}),
                "pool scorer")
            if best_pool is None or value > best_score:
                best_score = value
                best_pool = p
        out[s_id] = (row, col, best_pool)
        pools_per_row[row][best_pool] += server.capacity
    return out


def _validate_placement(instance: DataCenterInstance,
                        placement: dict[int, tuple[int, int, int]]):
    blocked = [set(rb[:-1]) for rb in instance.row_blocks]
    by_row: dict[int, list[tuple[int, int, int]]] = {}
    for s_id, (row, slot, pool) in placement.items():
        if s_id < 0 or s_id >= len(instance.servers):
            raise InvalidPlacementError(s_id, "unknown server index")
        server = instance.servers[s_id]
        if not 0 <= row < instance.n_rows:
            raise InvalidPlacementError(s_id, f"row {row} out of range")
        if slot < 0 or slot + server.size > instance.n_slots:
            raise InvalidPlacementError(s_id, f"segment [{slot}, {slot + server.size}) out of range")
        if not 0 <= pool < instance.n_pools:
            raise InvalidPlacementError(s_id, f"pool {pool} out of range")
        for b in blocked[row]:
            if slot <= b < slot + server.size:
                raise InvalidPlacementError(s_id, f"covers blocked slot {b}")
        by_row.setdefault(row, []).append((slot, slot + server.size, s_id))
    for row, spans in by_row.items():
        spans.sort()
        for (s1, e1, id1), (s2, e2, id2) in zip(spans, spans[1:]):
            if s2 < e1:
                raise InvalidPlacementError(id2, f"overlaps server {id1} in row {row}")


def guaranteed_capacity(instance: DataCenterInstance,
                        placement: dict[int, tuple[int, int, int]]) -> int:
    """Min over pools of (total capacity - largest single-row capacity)."""
    _validate_placement(instance, placement)
    per_pool_row = [[0] * instance.n_rows for _ in range(instance.n_pools)]
    for s_id, (row, slot, pool) in placement.items():
        per_pool_row[pool][row] += instance.servers[s_id].capacity
    result = None
    for p in range(instance.n_pools):
        rows = per_pool_row[p]
        value = sum(rows) - max(rows)
        if result is None or value < result:
            result = value
    return result if result is not None else 0


def run_backbone(instance: DataCenterInstance, program,
                 limits: RunLimits | None = None,
                 pool_order: str = "index") -> dict[int, tuple[int, int, int]]:
    limits = limits or RunLimits()
    placed = place_servers(instance, program, limits)
    return assign_pools(instance, placed, program, limits, order=pool_order)


def placement_to_submission(instance: DataCenterInstance,
                            placement: dict[int, tuple[int, int, int]]) -> str:
    lines = []
    for s_id in range(len(instance.servers)):
        if s_id in placement:
            row, slot, pool = placement[s_id]
            lines.append(f"{row} {slot} {pool}")
        else:
            lines.append("x")
    return "\n".join(lines) + "\n"


DESCRIBE = """\
Data-center placement, two choice points behind one scoring function:

    score(server, row, pool, pools_per_row, rate_server)

Phase 1 (rate_server = true, pool and pools_per_row bound to none):
servers are placed into row segments; among the open servers that fit
before the next blocked slot the highest-scoring one is placed, cycling
through rows in ascending id.  The base rating is server.capacity /
server.size.

Phase 2 (rate_server = false): each placed server picks the pool with the
highest score.  pools_per_row maps row id -> (pool id -> capacity already
assigned), updated after every assignment.  server has fields index, size,
capacity.  Final objective: min over pools of total capacity minus the
largest single-row capacity.
"""

HANDLE = register(ProblemHandle(
    name="datacenter2015",
    parse=parse_instance,
    run_backbone=run_backbone,
    evaluate=guaranteed_capacity,
    describe_backbone=DESCRIBE,
))
