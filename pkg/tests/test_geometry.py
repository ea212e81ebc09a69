"""Kernel tests: hulls, halfspace intersections, measures, and point queries."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import random_hull_points
from cbapprox import geometry as geo
from cbapprox.errors import (
    BadParams,
    DegenerateInput,
    Infeasible,
    NotNested,
    OriginNotInterior,
    Unbounded,
)


def make_square(half=1.0):
    return geo.convex_hull([[-half, -half], [half, -half], [half, half], [-half, half]])


def make_cube(half=1.0):
    corners = [[x, y, z] for x in (-half, half) for y in (-half, half) for z in (-half, half)]
    return geo.convex_hull(corners)


# -- construction ----------------------------------------------------------


def test_hull_vertices_are_extreme_by_pair_oracle():
    rng = np.random.default_rng(7)
    r = np.sqrt(rng.uniform(0, 1, size=200))
    ang = rng.uniform(0, 2 * math.pi, size=200)
    pts = np.stack([r * np.cos(ang), r * np.sin(ang)], axis=1)
    body = geo.convex_hull(pts)
    verdicts = oracles.extreme_by_pairs(pts)
    for v in body.vertices:
        i = int(np.argmin(np.linalg.norm(pts - v, axis=1)))
        assert verdicts[i], f"hull vertex {v} is not extreme per the oracle"
    assert body.n_vertices == int(verdicts.sum())


def test_cube_merges_coplanar_facets():
    cube = make_cube()
    assert cube.n_facets == 6
    assert cube.n_vertices == 8
    assert len(cube.edges) == 12
    for inc in cube.incidence:
        assert len(inc) == 4


def test_degenerate_inputs_rejected():
    with pytest.raises(DegenerateInput):
        geo.convex_hull([[0, 0], [1, 0], [2, 0], [3, 0]])
    with pytest.raises(DegenerateInput):
        geo.convex_hull([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]])
    with pytest.raises(DegenerateInput):
        geo.convex_hull([[0, 0], [0, 0], [0, 0]])


def test_halfspace_intersection_round_trip():
    rng = np.random.default_rng(3)
    for dim in (2, 3):
        pts = random_hull_points(rng, dim, 30)
        body = geo.convex_hull(pts)
        back = geo.halfspace_intersection(body.halfspaces())
        assert back.n_vertices == body.n_vertices
        for v in body.vertices:
            assert np.min(np.linalg.norm(back.vertices - v, axis=1)) < 1e-8 * body.scale


def test_halfspace_intersection_unbounded():
    planes = [
        geo.Hyperplane.from_general([1, 0], 1.0),
        geo.Hyperplane.from_general([-1, 0], 1.0),
        geo.Hyperplane.from_general([0, 1], 1.0),
    ]
    with pytest.raises(Unbounded):
        geo.halfspace_intersection(planes)


def test_halfspace_intersection_infeasible():
    planes = [
        geo.Hyperplane.from_general([1, 0], -2.0),
        geo.Hyperplane.from_general([-1, 0], 1.0),
        geo.Hyperplane.from_general([0, 1], 1.0),
        geo.Hyperplane.from_general([0, -1], 1.0),
    ]
    with pytest.raises(Infeasible):
        geo.halfspace_intersection(planes)


def test_halfspace_intersection_lower_dimensional():
    planes = [
        geo.Hyperplane.from_general([1, 0], 0.0),
        geo.Hyperplane.from_general([-1, 0], 0.0),
        geo.Hyperplane.from_general([0, 1], 1.0),
        geo.Hyperplane.from_general([0, -1], 1.0),
    ]
    with pytest.raises(DegenerateInput):
        geo.halfspace_intersection(planes)


# -- measures --------------------------------------------------------------


def test_volume_closed_forms():
    assert geo.volume(make_square()) == pytest.approx(4.0, abs=1e-12)
    assert geo.volume(make_cube()) == pytest.approx(8.0, abs=1e-12)
    tri = geo.convex_hull([[0, 0], [1, 0], [0, 1]])
    assert geo.volume(tri) == pytest.approx(0.5, abs=1e-12)
    tet = geo.convex_hull([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert geo.volume(tet) == pytest.approx(1.0 / 6.0, abs=1e-12)


@pytest.mark.parametrize("dim,seed", [(2, 11), (3, 12)])
def test_volume_matches_monte_carlo(dim, seed):
    rng = np.random.default_rng(seed)
    body = geo.convex_hull(random_hull_points(rng, dim, 40))
    mc = oracles.mc_volume(body, n=400_000, seed=seed)
    assert geo.volume(body) == pytest.approx(mc, rel=0.01)


@pytest.mark.parametrize("dim,seed", [(2, 21), (3, 22)])
def test_centroid_matches_monte_carlo(dim, seed):
    rng = np.random.default_rng(seed)
    body = geo.convex_hull(random_hull_points(rng, dim, 40) + 0.3)
    mc = oracles.mc_centroid(body, n=400_000, seed=seed)
    assert np.linalg.norm(geo.centroid(body) - mc) < 0.01 * body.diameter


def test_surface_area_closed_forms():
    assert geo.surface_area(make_square()) == pytest.approx(8.0, abs=1e-12)
    assert geo.surface_area(make_cube()) == pytest.approx(24.0, abs=1e-12)


@pytest.mark.parametrize("dim,seed", [(2, 31), (3, 32)])
def test_surface_area_matches_dilation_oracle(dim, seed):
    rng = np.random.default_rng(seed)
    body = geo.convex_hull(random_hull_points(rng, dim, 25))
    delta = 1e-4 * body.diameter
    ball = (
        oracles.circle_directions(512) if dim == 2 else oracles.fibonacci_sphere(512)
    ) * delta
    grown = oracles.minkowski_hull_volume(body.vertices, ball)
    rate = (grown - geo.volume(body)) / delta
    assert geo.surface_area(body) == pytest.approx(rate, rel=0.02)


# -- queries ---------------------------------------------------------------


def test_support_witness_and_scan():
    rng = np.random.default_rng(5)
    body = geo.convex_hull(random_hull_points(rng, 3, 30))
    for _ in range(50):
        u = rng.normal(size=3)
        val, wit = geo.support(body, u)
        assert val == pytest.approx(float((body.vertices @ u).max()), abs=1e-12)
        assert wit @ u == pytest.approx(val, abs=1e-12)


def test_ray_boundary_square_diagonal():
    sq = make_square()
    hit = geo.ray_boundary(sq, [0.0, 0.0], [2.0, 2.0])
    assert np.allclose(hit, [1.0, 1.0], atol=1e-12)
    hit = geo.ray_boundary(sq, [0.5, 0.0], [1.0, 0.0])
    assert np.allclose(hit, [1.0, 0.0], atol=1e-12)


def test_ray_boundary_requires_interior_origin():
    sq = make_square()
    with pytest.raises(OriginNotInterior):
        geo.ray_boundary(sq, [2.0, 0.0], [1.0, 0.0])


def test_ray_boundary_many_residuals():
    rng = np.random.default_rng(9)
    for dim in (2, 3):
        body = geo.convex_hull(random_hull_points(rng, dim, 30))
        o = geo.centroid(body)
        dirs = rng.normal(size=(200, dim))
        pts = geo.ray_boundary_many(body, o, dirs)
        res = body.residuals(pts)
        assert np.abs(res.max(axis=1)).max() < 1e-9 * body.scale


def test_contains_vertices_and_outside():
    cube = make_cube()
    assert geo.contains_all(cube, cube.vertices)
    assert not geo.contains(cube, [1.1, 0.0, 0.0])


def test_disjoint_matches_monte_carlo_overlap():
    rng = np.random.default_rng(41)
    base = make_square()
    for _ in range(20):
        shift = rng.uniform(-3, 3, size=2)
        other = base.translated(shift)
        is_disjoint = geo.disjoint(base, other)
        overlap = oracles.mc_overlap(base, other, n=60_000, seed=1)
        if overlap > 1e-3:
            assert not is_disjoint
        if overlap == 0.0 and np.abs(shift).max() > 2.05:
            assert is_disjoint


def test_distance_to_body_corner_and_face():
    cube = make_cube()
    assert geo.distance_to_body(cube, [0.2, -0.3, 0.1]) == 0.0
    assert geo.distance_to_body(cube, [2.0, 0.0, 0.0]) == pytest.approx(1.0, abs=1e-12)
    assert geo.distance_to_body(cube, [2.0, 2.0, 2.0]) == pytest.approx(
        math.sqrt(3.0), abs=1e-12
    )
    sq = make_square()
    assert geo.distance_to_body(sq, [3.0, 0.5]) == pytest.approx(2.0, abs=1e-12)


def test_hausdorff_nested_matches_support_gap():
    rng = np.random.default_rng(51)
    for dim in (2, 3):
        inner = geo.convex_hull(random_hull_points(rng, dim, 25))
        outer = inner.scaled(1.3)
        h = geo.hausdorff_nested(inner, outer)
        gap = oracles.support_difference(inner, outer, n_dirs=8192, seed=2)
        assert gap <= h + 1e-12
        assert h == pytest.approx(gap, rel=0.02)


def test_hausdorff_nested_rejects_non_nested():
    sq = make_square()
    with pytest.raises(NotNested):
        geo.hausdorff_nested(sq.scaled(1.5), sq)


# -- clipping --------------------------------------------------------------


def test_clip_square_to_rectangle():
    sq = make_square()
    cut = geo.clip_by_halfspace(sq, geo.Hyperplane.from_general([1.0, 0.0], 0.0))
    assert geo.volume(cut) == pytest.approx(2.0, abs=1e-12)
    gone = geo.clip_by_halfspace(sq, geo.Hyperplane.from_general([1.0, 0.0], -1.5))
    assert gone is None


def test_clip_cube_corner():
    cube = make_cube()
    # plane x+y+z <= 2.5 slices a corner simplex with legs 0.5
    plane = geo.Hyperplane.from_general([1.0, 1.0, 1.0], 2.5)
    kept = geo.clip_by_halfspace(cube, plane)
    removed = 8.0 - geo.volume(kept)
    assert removed == pytest.approx(0.5**3 / 6.0, rel=1e-9)


# -- files -----------------------------------------------------------------


def test_body_file_round_trip(tmp_path):
    rng = np.random.default_rng(61)
    for dim in (2, 3):
        body = geo.convex_hull(random_hull_points(rng, dim, 20))
        for rep in ("vertices", "halfspaces"):
            path = tmp_path / f"body-{dim}-{rep}.json"
            geo.save_body(body, path, rep)
            back = geo.load_body(path)
            assert back.dim == dim
            for v in body.vertices:
                assert np.min(np.linalg.norm(back.vertices - v, axis=1)) < 1e-7


def test_body_from_dict_normalizes_normals():
    doc = {
        "dim": 2,
        "halfspaces": [
            {"normal": [2, 0], "offset": 2},
            {"normal": [-3, 0], "offset": 3},
            {"normal": [0, 5], "offset": 5},
            {"normal": [0, -1], "offset": 1},
        ],
    }
    body = geo.body_from_dict(doc)
    assert np.allclose(np.linalg.norm(body.normals, axis=1), 1.0)
    assert geo.volume(body) == pytest.approx(4.0, abs=1e-9)


def test_tolerance_validation():
    with pytest.raises(BadParams):
        geo.Tolerance(eps_geom=1e-6, eps_containment=1e-7)
    with pytest.raises(BadParams):
        geo.Tolerance(eps_geom=0.0)


# -- properties ------------------------------------------------------------


@given(st.integers(0, 10_000), st.integers(8, 40))
def test_hull_contains_inputs(seed, n):
    rng = np.random.default_rng(seed)
    pts = random_hull_points(rng, 2, n)
    body = geo.convex_hull(pts)
    assert geo.contains_all(body, pts)


@given(st.integers(0, 10_000))
def test_scaling_scales_measures(seed):
    rng = np.random.default_rng(seed)
    body = geo.convex_hull(random_hull_points(rng, 2, 15))
    big = body.scaled(2.0)
    assert geo.volume(big) == pytest.approx(4.0 * geo.volume(body), rel=1e-9)
    assert geo.surface_area(big) == pytest.approx(2.0 * geo.surface_area(body), rel=1e-9)
