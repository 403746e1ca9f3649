"""Point-capture polygon building (AHC 039 style task).

Fish of two kinds live on a 100000x100000 integer grid; the goal is a
rectilinear simple polygon that captures max(0, type1 - type2 + 1) points,
under vertex-count and total-edge-length caps.  The backbone coarsens the
plane into square cells over the type-1 bounding box, then grows a
connected picked-cell region greedily from the best-scoring seed cell,
absorbing any fully enclosed pocket of unpicked cells so the region stays
hole-free.  After every addition the region is decoded to its boundary
polygon and the best valid one is kept.

Grid rows run along x (cell (i, j) covers x in [min_x + i*cell, ...)).
"""
from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass

from ..limits import BoundScorer, CandidateRejected, RunLimits, require_number
from .base import ProblemHandle, instance_id_for, register

COORD_MAX = 100_000
DEFAULT_MAX_VERTICES = 1000
DEFAULT_MAX_PERIMETER = 400_000
DEFAULT_CELL_SIZE = 2000
SWEEP_CELL_SIZES = (1500, 2000, 3000, 4000)

_NEIGHBOURS = ((-1, 0), (0, -1), (1, 0), (0, 1))


@dataclass(frozen=True)
class FishInstance:
    instance_id: str
    mackerels: frozenset[tuple[int, int]]
    sardines: frozenset[tuple[int, int]]


@dataclass(frozen=True)
class CoarseGrid:
    rows: int
    cols: int
    cell_size: int
    origin: tuple[int, int]
    mackerels: tuple[tuple[int, ...], ...]
    sardines: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class RectPolygon:
    vertices: tuple[tuple[int, int], ...]

    def perimeter(self) -> int:
        total = 0
        n = len(self.vertices)
        for k in range(n):
            (x1, y1), (x2, y2) = self.vertices[k], self.vertices[(k + 1) % n]
            total += abs(x2 - x1) + abs(y2 - y1)
        return total


@dataclass(frozen=True)
class AccreteStep:
    added: tuple[int, int]
    absorbed: tuple[tuple[int, int], ...]
    value: int
    polygon_valid: bool


@dataclass(frozen=True)
class AccreteResult:
    best_value: int
    best_polygon: RectPolygon | None
    steps: tuple[AccreteStep, ...]


def parse_instance(data: bytes, instance_id: str | None = None) -> FishInstance:
    tokens = data.decode("utf-8").split("\n")
    lines = [ln for ln in tokens if ln.strip()]
    if not lines:
        raise ValueError("empty input")
    n = int(lines[0])
    if n < 0:
        raise ValueError("negative point count")
    if len(lines) != 1 + 2 * n:
        raise ValueError(f"expected {2 * n} point lines, got {len(lines) - 1}")

    def read_points(rows: list[str]) -> frozenset[tuple[int, int]]:
        points = set()
        for ln in rows:
            parts = ln.split()
            if len(parts) != 2:
                raise ValueError(f"malformed point line {ln!r}")
            x, y = int(parts[0]), int(parts[1])
            if not (0 <= x <= COORD_MAX and 0 <= y <= COORD_MAX):
                raise ValueError(f"point ({x}, {y}) out of bounds")
            points.add((x, y))  # duplicates collapse to one
        return frozenset(points)

    return FishInstance(instance_id_for(data, instance_id),
                        read_points(lines[1:1 + n]),
                        read_points(lines[1 + n:1 + 2 * n]))


def coarsen(instance: FishInstance, cell_size: int) -> CoarseGrid:
    """Cell counts over the type-1 bounding box; type-2 points outside the
    box are not counted anywhere."""
    if cell_size < 1:
        raise ValueError("cell_size must be >= 1")
    if not instance.mackerels:
        raise ValueError("instance has no type-1 points")
    xs = [p[0] for p in instance.mackerels]
    ys = [p[1] for p in instance.mackerels]
    min_x, max_x = min(xs), max(xs)
    min_y, max_y = min(ys), max(ys)
    rows = (max_x - min_x) // cell_size + 1
    cols = (max_y - min_y) // cell_size + 1
    macks = [[0] * cols for _ in range(rows)]
    sards = [[0] * cols for _ in range(rows)]
    for x, y in instance.mackerels:
        macks[(x - min_x) // cell_size][(y - min_y) // cell_size] += 1
    for x, y in instance.sardines:
        if x < min_x or x > max_x or y < min_y or y > max_y:
            continue
        sards[(x - min_x) // cell_size][(y - min_y) // cell_size] += 1
    return CoarseGrid(rows, cols, cell_size, (min_x, min_y),
                      tuple(tuple(r) for r in macks),
                      tuple(tuple(r) for r in sards))


def enclosed_region(picked: set[tuple[int, int]], start: tuple[int, int],
                    rows: int, cols: int) -> list[tuple[int, int]]:
    """Unpicked cells connected to start, or [] if the region reaches the
    grid border (then it is not enclosed and must stay unpicked)."""
    stack = [start]
    seen: set[tuple[int, int]] = set()
    while stack:
        cell = stack.pop()
        if cell in seen:
            continue
        seen.add(cell)
        for dx, dy in _NEIGHBOURS:
            nxt = (cell[0] + dx, cell[1] + dy)
            if nxt[0] < 0 or nxt[0] >= rows or nxt[1] < 0 or nxt[1] >= cols:
                return []
            if nxt in picked or nxt in seen:
                continue
            stack.append(nxt)
    return sorted(seen)


def accrete(grid: CoarseGrid, program, limits: RunLimits | None = None,
            max_vertices: int = DEFAULT_MAX_VERTICES,
            max_perimeter: int = DEFAULT_MAX_PERIMETER) -> AccreteResult:
    """Greedy cell accretion driven by the scoring program.

    The seed is the best cell scored against an empty picked set; each
    addition absorbs enclosed pockets, rescored neighbours are pushed, and
    after every addition the catch value max(0, type1 - type2 + 1) is
    tracked whenever the decoded polygon is valid.
    """
    limits = limits or RunLimits()
    scorer = BoundScorer(program, limits)
    rows, cols = grid.rows, grid.cols
    picked: dict[tuple[int, int], bool] = {}

    def score_cell(r: int, c: int):
        return require_number(
            scorer({"grid": grid, "row": r, "col": c, "picked_cells": picked}),
            "cell scorer")

    best_cell = None
    best_score = 0
    limits.tick()
    for r in range(rows):
        for c in range(cols):
            value = score_cell(r, c)
            if best_cell is None or value > best_score:
                best_cell = (r, c)
                best_score = value
    heap: list = []
    heapq.heappush(heap, (_neg(best_score), best_cell))

    picked_set: set[tuple[int, int]] = set()
    curr_m = 0
    curr_s = 0
    best_value = -1
    best_polygon: RectPolygon | None = None
    steps: list[AccreteStep] = []
    while heap:
        limits.tick()
        _, cell = heapq.heappop(heap)
        if cell in picked_set:
            continue
        added = [cell]
        picked_set.add(cell)
        picked[cell] = True
        curr_m += grid.mackerels[cell[0]][cell[1]]
        curr_s += grid.sardines[cell[0]][cell[1]]
        absorbed: list[tuple[int, int]] = []
        for dx, dy in _NEIGHBOURS:
            nxt = (cell[0] + dx, cell[1] + dy)
            if nxt[0] < 0 or nxt[0] >= rows or nxt[1] < 0 or nxt[1] >= cols:
                continue
            if nxt in picked_set:
                continue
            region = enclosed_region(picked_set, nxt, rows, cols)
            for pocket_cell in region:
                picked_set.add(pocket_cell)
                picked[pocket_cell] = True
                curr_m += grid.mackerels[pocket_cell[0]][pocket_cell[1]]
                curr_s += grid.sardines[pocket_cell[0]][pocket_cell[1]]
                absorbed.append(pocket_cell)
        for dx, dy in _NEIGHBOURS:
            nxt = (cell[0] + dx, cell[1] + dy)
            if nxt[0] < 0 or nxt[0] >= rows or nxt[1] < 0 or nxt[1] >= cols:
                continue
            if nxt in picked_set:
                continue
            heapq.heappush(heap, (_neg(score_cell(nxt[0], nxt[1])), nxt))
        value = max(0, curr_m - curr_s + 1)
        polygon = decode_to_polygon(picked_set, grid.cell_size, grid.origin,
                                    max_vertices, max_perimeter)
        if polygon is not None and value >= best_value:
            best_value = value
            best_polygon = polygon
        steps.append(AccreteStep(cell, tuple(absorbed), value,
                                 polygon is not None))
    return AccreteResult(max(0, best_value), best_polygon, tuple(steps))


def _neg(value):
    # heapq is a min-heap; ties then break on the cell coordinate
    return -value


# --- boundary decoding ---

def _boundary_edges(cells: set[tuple[int, int]]):
    """Directed unit edges around the cell union, interior on the left."""
    edges: dict[tuple[int, int], list[tuple[int, int]]] = {}

    def add(a, b):
        edges.setdefault(a, []).append(b)

    for (i, j) in cells:
        if (i, j - 1) not in cells:
            add((i, j), (i + 1, j))
        if (i + 1, j) not in cells:
            add((i + 1, j), (i + 1, j + 1))
        if (i, j + 1) not in cells:
            add((i + 1, j + 1), (i, j + 1))
        if (i - 1, j) not in cells:
            add((i, j + 1), (i, j))
    return edges


def _turn_rank(din, dout) -> int:
    # prefer the sharpest left turn: left > straight > right > back
    cross = din[0] * dout[1] - din[1] * dout[0]
    dot = din[0] * dout[0] + din[1] * dout[1]
    if cross > 0:
        return 0
    if cross == 0 and dot > 0:
        return 1
    if cross < 0:
        return 2
    return 3


def trace_outer_boundary(cells: set[tuple[int, int]]) -> list[tuple[int, int]] | None:
    """Corner walk around the union of cells; None when the union is not a
    simple hole-free region (pinch point, interior hole)."""
    if not cells:
        return None
    edges = _boundary_edges(cells)
    total_edges = sum(len(v) for v in edges.values())
    start = min(edges)
    path = [start]
    used = 0
    prev_dir = None
    point = start
    while True:
        options = edges.get(point)
        if not options:
            return None
        if len(options) == 1 or prev_dir is None:
            nxt = options[0]
        else:
            nxt = min(options,
                      key=lambda q: _turn_rank(prev_dir, (q[0] - point[0], q[1] - point[1])))
        options.remove(nxt)
        used += 1
        prev_dir = (nxt[0] - point[0], nxt[1] - point[1])
        point = nxt
        if point == start:
            break
        path.append(point)
        if len(path) > total_edges + 1:
            return None  # walk failed to close (should not happen)
    if used != total_edges:
        return None  # leftover edges: interior hole or detached ring
    if len(set(path)) != len(path):
        return None  # pinch point: boundary touches itself
    return path


def _merge_collinear(points: list[tuple[int, int]]) -> list[tuple[int, int]]:
    out: list[tuple[int, int]] = []
    n = len(points)
    for k in range(n):
        prev_pt = points[(k - 1) % n]
        cur = points[k]
        nxt = points[(k + 1) % n]
        if cur == prev_pt:
            continue
        d1 = (cur[0] - prev_pt[0], cur[1] - prev_pt[1])
        d2 = (nxt[0] - cur[0], nxt[1] - cur[1])
        if d1[0] * d2[1] - d1[1] * d2[0] == 0 and (d2[0] or d2[1]):
            continue  # straight-through corner
        out.append(cur)
    return out


def decode_to_polygon(picked_cells: set[tuple[int, int]], cell_size: int,
                      origin: tuple[int, int],
                      max_vertices: int = DEFAULT_MAX_VERTICES,
                      max_perimeter: int = DEFAULT_MAX_PERIMETER) -> RectPolygon | None:
    """Outer boundary of the picked-cell union in grid coordinates, clipped
    to the playing field; None when invalid (hole, pinch, or over the
    vertex/perimeter caps)."""
    corners = trace_outer_boundary(picked_cells)
    if corners is None:
        return None
    ox, oy = origin
    real = [(min(ox + x * cell_size, COORD_MAX), min(oy + y * cell_size, COORD_MAX))
            for (x, y) in corners]
    vertices = _merge_collinear(real)
    if len(vertices) < 4:
        return None
    if len(set(vertices)) != len(vertices):
        return None  # clipping collapsed the ring onto itself
    polygon = RectPolygon(tuple(vertices))
    if len(vertices) > max_vertices or polygon.perimeter() > max_perimeter:
        return None
    return polygon


def validate_polygon(polygon: RectPolygon,
                     max_vertices: int = DEFAULT_MAX_VERTICES,
                     max_perimeter: int = DEFAULT_MAX_PERIMETER) -> list[str]:
    """Independent validity check; returns a list of violations (empty when
    the polygon satisfies every constraint)."""
    problems = []
    verts = polygon.vertices
    n = len(verts)
    if n < 4:
        problems.append("fewer than 4 vertices")
        return problems
    if n > max_vertices:
        problems.append(f"{n} vertices exceeds cap {max_vertices}")
    if len(set(verts)) != n:
        problems.append("repeated vertex")
    horizontal = None
    for k in range(n):
        (x1, y1), (x2, y2) = verts[k], verts[(k + 1) % n]
        if not (0 <= x1 <= COORD_MAX and 0 <= y1 <= COORD_MAX):
            problems.append(f"vertex {verts[k]} out of bounds")
        if x1 == x2 and y1 == y2:
            problems.append(f"zero-length edge at {verts[k]}")
            continue
        if x1 != x2 and y1 != y2:
            problems.append(f"diagonal edge at {verts[k]}")
            continue
        is_h = y1 == y2
        if horizontal is not None and is_h == horizontal:
            problems.append(f"consecutive parallel edges at {verts[k]}")
        horizontal = is_h
    if polygon.perimeter() > max_perimeter:
        problems.append(f"perimeter {polygon.perimeter()} exceeds cap {max_perimeter}")
    if not problems:
        for a in range(n):
            for b in range(a + 1, n):
                if _edges_conflict(verts, a, b, n):
                    problems.append(f"edges {a} and {b} intersect")
    return problems


def _edge(verts, k, n):
    return verts[k], verts[(k + 1) % n]


def _edges_conflict(verts, a, b, n) -> bool:
    (p1, p2), (q1, q2) = _edge(verts, a, n), _edge(verts, b, n)
    pts = _segment_overlap(p1, p2, q1, q2)
    if not pts:
        return False
    adjacent = (b == a + 1) or (a == 0 and b == n - 1)
    if adjacent:
        shared = p2 if b == a + 1 else p1
        return pts != [shared]
    return True


def _segment_overlap(p1, p2, q1, q2) -> list[tuple[int, int]]:
    """Integer intersection points (up to 2 endpoints of an overlap run) of
    two axis-aligned segments; [] when disjoint."""
    def rng(a, b):
        return (min(a, b), max(a, b))

    p_h = p1[1] == p2[1]
    q_h = q1[1] == q2[1]
    if p_h and q_h:
        if p1[1] != q1[1]:
            return []
        lo = max(rng(p1[0], p2[0])[0], rng(q1[0], q2[0])[0])
        hi = min(rng(p1[0], p2[0])[1], rng(q1[0], q2[0])[1])
        if lo > hi:
            return []
        return [(lo, p1[1])] if lo == hi else [(lo, p1[1]), (hi, p1[1])]
    if not p_h and not q_h:
        if p1[0] != q1[0]:
            return []
        lo = max(rng(p1[1], p2[1])[0], rng(q1[1], q2[1])[0])
        hi = min(rng(p1[1], p2[1])[1], rng(q1[1], q2[1])[1])
        if lo > hi:
            return []
        return [(p1[0], lo)] if lo == hi else [(p1[0], lo), (p1[0], hi)]
    if p_h:
        h1, h2, v1, v2 = p1, p2, q1, q2
    else:
        h1, h2, v1, v2 = q1, q2, p1, p2
    hy = h1[1]
    vx = v1[0]
    if rng(h1[0], h2[0])[0] <= vx <= rng(h1[0], h2[0])[1] and \
            rng(v1[1], v2[1])[0] <= hy <= rng(v1[1], v2[1])[1]:
        return [(vx, hy)]
    return []


def point_in_polygon(point: tuple[int, int], polygon: RectPolygon) -> bool:
    """Boundary-inclusive containment for axis-aligned polygons."""
    px, py = point
    verts = polygon.vertices
    n = len(verts)
    crossings = 0
    for k in range(n):
        (x1, y1), (x2, y2) = verts[k], verts[(k + 1) % n]
        if y1 == y2:  # horizontal edge
            if py == y1 and min(x1, x2) <= px <= max(x1, x2):
                return True
            continue
        # vertical edge
        if px == x1 and min(y1, y2) <= py <= max(y1, y2):
            return True
        if min(y1, y2) <= py < max(y1, y2) and px < x1:
            crossings += 1
    return crossings % 2 == 1


def score_polygon(instance: FishInstance, polygon: RectPolygon) -> int:
    """Exact task score: max(0, captured type1 - captured type2 + 1)."""
    if polygon is None:
        raise ValueError("no polygon to score")
    captured_m = sum(1 for p in instance.mackerels if point_in_polygon(p, polygon))
    captured_s = sum(1 for p in instance.sardines if point_in_polygon(p, polygon))
    return max(0, captured_m - captured_s + 1)


def run_backbone(instance: FishInstance, program,
                 limits: RunLimits | None = None,
                 cell_size: int = DEFAULT_CELL_SIZE,
                 sweep_sizes: tuple[int, ...] | None = None,
                 max_vertices: int = DEFAULT_MAX_VERTICES,
                 max_perimeter: int = DEFAULT_MAX_PERIMETER) -> RectPolygon:
    """Run accretion (optionally over a sweep of cell sizes) and return the
    polygon with the highest exact score."""
    limits = limits or RunLimits()
    sizes = sweep_sizes if sweep_sizes else (cell_size,)
    best = None
    best_score = None
    for size in sizes:
        grid = coarsen(instance, size)
        result = accrete(grid, program, limits, max_vertices, max_perimeter)
        if result.best_polygon is None:
            continue
        value = score_polygon(instance, result.best_polygon)
        if best_score is None or value > best_score:
            best_score = value
            best = result.best_polygon
    if best is None:
        raise CandidateRejected("accretion produced no valid polygon")
    return best


def evaluate(instance: FishInstance, solution: RectPolygon) -> int:
    return score_polygon(instance, solution)


def polygon_to_submission(polygon: RectPolygon) -> str:
    lines = [str(len(polygon.vertices))]
    lines.extend(f"{x} {y}" for x, y in polygon.vertices)
    return "\n".join(lines) + "\n"


# --- instance generation (mixture of Gaussians, seeded) ---

@dataclass(frozen=True)
class GenParams:
    n_points: int = 5000
    cluster_range: tuple[int, int] = (2, 5)
    sigma_range: tuple[float, float] = (2000.0, 10000.0)
    resample_tries: int = 100


def _sample_points(rng: random.Random, params: GenParams) -> list[tuple[int, int]]:
    k = rng.randint(*params.cluster_range)
    centers = [(rng.uniform(0, COORD_MAX), rng.uniform(0, COORD_MAX))
               for _ in range(k)]
    sigmas = [rng.uniform(*params.sigma_range) for _ in range(k)]
    weights = [rng.uniform(0.2, 1.0) for _ in range(k)]
    total_weight = sum(weights)
    points = []
    for _ in range(params.n_points):
        roll = rng.uniform(0, total_weight)
        idx = 0
        acc = weights[0]
        while roll > acc and idx < k - 1:
            idx += 1
            acc += weights[idx]
        cx, cy = centers[idx]
        sigma = sigmas[idx]
        for _ in range(params.resample_tries):
            x = round(rng.gauss(cx, sigma))
            y = round(rng.gauss(cy, sigma))
            if 0 <= x <= COORD_MAX and 0 <= y <= COORD_MAX:
                break
        else:
            x = min(max(round(cx), 0), COORD_MAX)
            y = min(max(round(cy), 0), COORD_MAX)
        points.append((x, y))
    return points


def generate_instance_text(seed: int, params: GenParams = GenParams()) -> str:
    """Deterministic instance file text for one seed (byte-stable)."""
    rng = random.Random(seed)
    mackerels = _sample_points(rng, params)
    sardines = _sample_points(rng, params)
    lines = [str(params.n_points)]
    lines.extend(f"{x} {y}" for x, y in mackerels)
    lines.extend(f"{x} {y}" for x, y in sardines)
    return "\n".join(lines) + "\n"


def generate_instance(seed: int, params: GenParams = GenParams()) -> FishInstance:
    text = generate_instance_text(seed, params)
    return parse_instance(text.encode("utf-8"), f"gen-{seed}")


def bootstrap_ci(mean: float, std: float, n_instances: int = 150) -> tuple[float, float]:
    """Scale a per-instance mean/standard deviation to a full-set total and
    a 95% half-width: (n * mean, 2 * sqrt(n) * std)."""
    if std < 0:
        raise ValueError("std must be non-negative")
    return n_instances * mean, 2.0 * math.sqrt(n_instances) * std


DESCRIBE = """\
Polygon capture on a coarse grid.  The scoring function rates one cell:

    score(grid, row, col, picked_cells)

grid has fields rows, cols, cell_size, origin, mackerels and sardines
(the latter two are per-cell count matrices indexed [row][col]);
picked_cells maps already-picked (row, col) pairs to true.  The backbone
seeds with the best cell scored against an empty picked set, then
repeatedly adds the highest-scoring frontier cell, absorbs enclosed
pockets, and keeps the best valid boundary polygon by catch value
max(0, type1 - type2 + 1).
"""

HANDLE = register(ProblemHandle(
    name="fishing_ahc039",
    parse=parse_instance,
    run_backbone=run_backbone,
    evaluate=evaluate,
    describe_backbone=DESCRIBE,
))
