import random

import pytest

from evoscore.lang import parse
from evoscore.problems import fitness, reference_program, registry_lookup
from evoscore.problems.fishing_ahc039 import (
    GenParams, RectPolygon, accrete, bootstrap_ci, coarsen, decode_to_polygon,
    enclosed_region, generate_instance, generate_instance_text, parse_instance,
    point_in_polygon, polygon_to_submission, run_backbone,
    trace_outer_boundary, validate_polygon,
)

BASE = reference_program("fishing-base").program()
EVOLVED = reference_program("fishing-evolved").program()


def make_instance(mackerels, sardines):
    n = max(len(mackerels), len(sardines))
    mackerels = list(mackerels) + [mackerels[-1]] * (n - len(mackerels))
    sardines = list(sardines) + [sardines[-1]] * (n - len(sardines))
    lines = [str(n)]
    lines.extend(f"{x} {y}" for x, y in mackerels)
    lines.extend(f"{x} {y}" for x, y in sardines)
    return parse_instance("\n".join(lines).encode(), "made")


# --- parsing ---

def test_parse_one_of_each():
    inst = parse_instance(b"1\n0 0\n5 5\n", "pair")
    assert inst.mackerels == frozenset({(0, 0)})
    assert inst.sardines == frozenset({(5, 5)})


def test_duplicates_collapse():
    inst = parse_instance(b"2\n3 3\n3 3\n5 5\n6 6\n", "dups")
    assert inst.mackerels == frozenset({(3, 3)})


def test_out_of_bounds_point():
    with pytest.raises(ValueError):
        parse_instance(b"1\n100001 0\n0 0\n", "oob")


# --- coarsening ---

def test_coarsen_single_cell():
    inst = make_instance([(0, 0), (1999, 1999)], [(5, 5)])
    grid = coarsen(inst, 2000)
    assert (grid.rows, grid.cols) == (1, 1)
    assert grid.mackerels[0][0] == 2
    assert grid.sardines[0][0] == 1


def test_coarsen_excludes_sardines_outside_window():
    inst = make_instance([(1000, 1000), (2999, 1000)], [(90000, 90000)])
    grid = coarsen(inst, 2000)
    assert sum(map(sum, grid.sardines)) == 0


def test_coarsen_column_count_is_ceiling():
    inst = make_instance([(0, 0), (0, 5000)], [(0, 0)])
    grid = coarsen(inst, 2000)
    assert grid.cols == 3  # 5000-wide span, 2000 cells
    assert grid.rows == 1


def test_coarsen_requires_mackerels():
    inst = make_instance([(0, 0)], [(1, 1)])
    empty = parse_instance(b"0\n", "none")
    with pytest.raises(ValueError):
        coarsen(empty, 2000)
    assert coarsen(inst, 2000).rows == 1


# --- accretion ---

def test_single_cell_value():
    inst = make_instance([(10, 10), (20, 20), (30, 30)], [(15, 15)])
    grid = coarsen(inst, 2000)
    result = accrete(grid, BASE)
    assert result.best_value == 3  # 3 - 1 + 1
    assert result.best_polygon is not None


def test_all_sardine_cells_clamp_to_zero():
    inst = make_instance([(10, 10)], [(12, 12), (14, 14), (16, 16)])
    grid = coarsen(inst, 2000)
    result = accrete(grid, BASE)
    assert result.best_value >= 0


def test_ring_pick_absorbs_the_hole():
    # 3x3 grid of cells; the scorer hates the centre, so the ring is picked
    # first and the centre is absorbed by the flood fill
    mack = []
    for i in range(3):
        for j in range(3):
            if (i, j) != (1, 1):
                mack.append((i * 1000 + 500, j * 1000 + 500))
    mack.append((0, 0))
    mack.append((2999, 2999))
    sard = [(1500, 1500)]  # centre cell
    inst = make_instance(mack, sard)
    grid = coarsen(inst, 1000)
    assert (grid.rows, grid.cols) == (3, 3)
    hater = parse("""
fn score(grid, row, col, picked_cells) {
    return grid.mackerels[row][col] - 100 * grid.sardines[row][col];
}
""")
    result = accrete(grid, hater)
    absorbed = [step for step in result.steps if step.absorbed]
    assert absorbed, "centre pocket was never absorbed"
    assert (1, 1) in absorbed[-1].absorbed
    # counts include the interior sardine once the pocket is absorbed
    assert result.steps[-1].value == max(0, 10 - 1 + 1)


def test_flood_fill_never_absorbs_border_touching_regions():
    picked = {(0, 1), (1, 0), (1, 2)}  # open cross, centre leaks to border
    assert enclosed_region(picked, (1, 1), 3, 3) == []
    closed = {(0, 1), (1, 0), (1, 2), (2, 1)}
    assert enclosed_region(closed, (1, 1), 3, 3) == [(1, 1)]


def test_scorer_error_rejects_candidate():
    from evoscore.limits import CandidateRejected
    inst = make_instance([(10, 10)], [(15, 15)])
    bad = parse("fn score(grid, row, col, picked_cells) { return 1 / (row * 0); }")
    with pytest.raises(Exception) as err:
        run_backbone(inst, bad)
    assert err.type.__name__ in ("EvalError", "CandidateRejected")


# --- polygon decoding ---

def test_single_cell_square():
    poly = decode_to_polygon({(0, 0)}, 2000, (0, 0))
    assert poly is not None
    assert len(poly.vertices) == 4
    assert poly.perimeter() == 8000


def test_two_cell_rectangle():
    poly = decode_to_polygon({(0, 0), (1, 0)}, 2000, (0, 0))
    assert len(poly.vertices) == 4
    assert poly.perimeter() == 2 * (4000 + 2000)


def test_l_tromino_has_six_vertices():
    poly = decode_to_polygon({(0, 0), (1, 0), (0, 1)}, 2000, (0, 0))
    assert len(poly.vertices) == 6
    assert validate_polygon(poly) == []


def test_hole_is_invalid():
    ring = {(i, j) for i in range(3) for j in range(3)} - {(1, 1)}
    assert trace_outer_boundary(ring) is None
    assert decode_to_polygon(ring, 1000, (0, 0)) is None


def test_pinched_region_is_invalid():
    # (1,1) and (2,2) touch only at a corner; the hook connecting them
    # encircles the cells between, so the union is not a simple region
    cells = {(1, 1), (1, 0), (2, 0), (3, 0), (3, 1), (3, 2), (2, 2)}
    assert trace_outer_boundary(cells) is None
    assert decode_to_polygon(cells, 1000, (0, 0)) is None
    # the same hook without the diagonal cell decodes fine
    assert decode_to_polygon(cells - {(2, 2)}, 1000, (0, 0)) is not None


def test_vertex_cap_invalidates():
    # a comb: spine of six cells with three teeth has well over 4 corners
    cells = {(i, 0) for i in range(6)} | {(0, 1), (2, 1), (4, 1)}
    poly = decode_to_polygon(cells, 100, (0, 0), max_vertices=1000)
    assert poly is not None and len(poly.vertices) > 4
    tight = len(poly.vertices) - 1
    assert decode_to_polygon(cells, 100, (0, 0), max_vertices=tight) is None


def test_perimeter_cap_invalidates():
    cells = {(0, 0)}
    assert decode_to_polygon(cells, 2000, (0, 0), max_perimeter=7999) is None
    assert decode_to_polygon(cells, 2000, (0, 0), max_perimeter=8000) is not None


def test_clipping_stays_inside_field():
    # a cell stretching past the upper corner is clipped to 100000
    poly = decode_to_polygon({(0, 0)}, 3000, (99000, 99000))
    assert poly is not None
    assert all(0 <= x <= 100000 and 0 <= y <= 100000 for x, y in poly.vertices)
    assert validate_polygon(poly) == []


def test_validate_polygon_catches_defects():
    assert validate_polygon(RectPolygon(((0, 0), (10, 0), (10, 10)))) != []
    diagonal = RectPolygon(((0, 0), (10, 10), (10, 0), (0, 10)))
    assert any("diagonal" in p for p in validate_polygon(diagonal))
    parallel = RectPolygon(((0, 0), (5, 0), (10, 0), (10, 10), (0, 10), (0, 5)))
    assert any("parallel" in p for p in validate_polygon(parallel))
    crossing = RectPolygon(((0, 0), (10, 0), (10, 6), (4, 6), (4, 12),
                            (0, 12)))
    assert validate_polygon(crossing) == []  # this L is actually fine


def test_point_in_polygon_boundary_inclusive():
    square = RectPolygon(((0, 0), (10, 0), (10, 10), (0, 10)))
    assert point_in_polygon((5, 5), square)
    assert point_in_polygon((0, 0), square)
    assert point_in_polygon((10, 5), square)
    assert point_in_polygon((5, 10), square)
    assert not point_in_polygon((11, 5), square)
    assert not point_in_polygon((5, 11), square)


def test_point_in_polygon_concave():
    ell = RectPolygon(((0, 0), (20, 0), (20, 10), (10, 10), (10, 20), (0, 20)))
    assert point_in_polygon((5, 15), ell)
    assert not point_in_polygon((15, 15), ell)
    assert point_in_polygon((10, 15), ell)  # on the inner edge


def test_cell_bookkeeping_matches_point_count_off_boundaries():
    rng = random.Random(39)
    for _ in range(10):
        mack = [(rng.randrange(100, 9900), rng.randrange(100, 9900))
                for _ in range(30)]
        sard = [(rng.randrange(100, 9900), rng.randrange(100, 9900))
                for _ in range(30)]
        # keep points off multiples of the cell size so boundary semantics
        # cannot blur the comparison
        mack = [(x + (x % 1000 == 0), y + (y % 1000 == 0)) for x, y in mack]
        sard = [(x + (x % 1000 == 0), y + (y % 1000 == 0)) for x, y in sard]
        inst = make_instance(mack, sard)
        grid = coarsen(inst, 1000)
        result = accrete(grid, BASE)
        if result.best_polygon is None:
            continue
        final_value = [s.value for s in result.steps if s.polygon_valid]
        poly = result.best_polygon
        m_in = sum(1 for p in inst.mackerels if point_in_polygon(p, poly))
        s_in = sum(1 for p in inst.sardines if point_in_polygon(p, poly))
        assert max(0, m_in - s_in + 1) in final_value


# --- instance generation ---

def test_generation_deterministic_and_different_across_seeds():
    params = GenParams(n_points=50)
    a = generate_instance_text(1, params)
    b = generate_instance_text(1, params)
    c = generate_instance_text(2, params)
    assert a == b
    assert a != c


def test_generated_instances_parse_and_stay_in_bounds():
    params = GenParams(n_points=100)
    inst = generate_instance(7, params)
    for x, y in inst.mackerels | inst.sardines:
        assert 0 <= x <= 100000 and 0 <= y <= 100000


def test_tight_cluster_stays_near_centre():
    params = GenParams(n_points=60, cluster_range=(1, 1),
                       sigma_range=(10.0, 10.0))
    inst = generate_instance(3, params)
    xs = [p[0] for p in inst.mackerels]
    assert max(xs) - min(xs) < 200


# --- bootstrap confidence interval ---

def test_bootstrap_ci_scaling():
    total, half = bootstrap_ci(3521.9, 424.4)
    assert abs(total - 528285.4) / 528285.4 < 0.0005
    assert abs(half - 10396.6) / 10396.6 < 0.0005
    assert bootstrap_ci(0.0, 0.0) == (0.0, 0.0)
    total_1, half_1 = bootstrap_ci(1.0, 1.0)
    assert total_1 == 150.0
    assert abs(half_1 - 24.4949) < 1e-4  # 2 * sqrt(150)


def test_bootstrap_rejects_negative_std():
    with pytest.raises(ValueError):
        bootstrap_ci(1.0, -0.5)


# --- pipeline ---

def test_fitness_via_handle(fish_tiny):
    handle = registry_lookup("fishing_ahc039")
    assert fitness(handle, fish_tiny, BASE) == 3


def test_sweep_picks_best_cell_size(fish_tiny):
    poly = run_backbone(fish_tiny, BASE, sweep_sizes=(1500, 2000, 3000, 4000))
    assert validate_polygon(poly) == []


def test_evolved_scorer_runs_end_to_end():
    inst = generate_instance(11, GenParams(n_points=40, cluster_range=(1, 1),
                                           sigma_range=(500.0, 1500.0)))
    handle = registry_lookup("fishing_ahc039")
    score = fitness(handle, inst, EVOLVED)
    assert isinstance(score, int) and score >= 0


def test_submission_format():
    poly = RectPolygon(((0, 0), (10, 0), (10, 10), (0, 10)))
    assert polygon_to_submission(poly) == "4\n0 0\n10 0\n10 10\n0 10\n"
