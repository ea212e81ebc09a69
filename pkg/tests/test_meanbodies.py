import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cbapprox import geometry as geo
from cbapprox.errors import BadParams, NotNested, OriginNotInterior
from cbapprox.geometry import ConvexBody, convex_hull, hausdorff_nested, ray_boundary, support_values, volume
from cbapprox.macbeath import cross_ratio, macbeath_body
from cbapprox.meanbodies import (
    NestedPair,
    _intersection_volume,
    arithmetic_mean_body,
    fatness_audit,
    harmonic_bundle_deviation,
    harmonic_mean_body,
    harmonic_mean_radial,
    hm_fat_aux_audit,
    minkowski_sum,
    shadow_containment_audit,
)
from cbapprox.sampling import random_directions

from conftest import random_hull_points
from oracles import minkowski_hull_volume, mc_overlap


def box2(hx, hy):
    return ConvexBody.from_ordered_polygon(
        [[-hx, -hy], [hx, -hy], [hx, hy], [-hx, hy]]
    )


def square(s=1.0):
    return box2(s, s)


def cube(s=1.0):
    corners = np.array(np.meshgrid([-s, s], [-s, s], [-s, s])).reshape(3, -1).T
    return ConvexBody.from_points(corners.astype(float))


def ngon(n, r=1.0):
    ang = 2.0 * np.pi * np.arange(n) / n
    return ConvexBody.from_ordered_polygon(np.stack([r * np.cos(ang), r * np.sin(ang)], axis=1))


def diamond(r=1.0):
    return ConvexBody.from_ordered_polygon([[r, 0.0], [0.0, r], [-r, 0.0], [0.0, -r]])


def assert_same_vertex_set(a, b, atol=1e-9):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    assert len(a) == len(b)
    dist = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    assert dist.min(axis=1).max() <= atol
    assert dist.min(axis=0).max() <= atol


def random_pair(rng, dim, n=16, factor=1.8, skinny=None):
    pts = random_hull_points(rng, dim, n)
    if skinny is not None:
        pts = pts * np.array(skinny)
    inner = convex_hull(pts)
    return NestedPair(inner, inner.scaled(factor))


# -- Minkowski sums ----------------------------------------------------------


def test_minkowski_sum_squares():
    S = minkowski_sum(square(1.0), square(1.0))
    assert_same_vertex_set(S.vertices, [[-2, -2], [-2, 2], [2, -2], [2, 2]], atol=1e-12)
    assert volume(S) == pytest.approx(16.0)


def test_minkowski_sum_rounded_square_support_additivity(rng):
    A, B = square(1.0), ngon(64, 0.25)
    S = minkowski_sum(A, B)
    dirs = random_directions(rng, 2, 100)
    gap = np.abs(
        support_values(S, dirs) - support_values(A, dirs) - support_values(B, dirs)
    ).max()
    assert gap <= 1e-9
    assert S.n_vertices > 60  # rounded corners keep most circle vertices


def test_minkowski_sum_point_is_translate():
    A = square(1.0)
    shift = np.array([[0.3, -0.2]])
    S = minkowski_sum(A, shift)
    assert_same_vertex_set(S.vertices, A.vertices + shift, atol=1e-12)


def test_minkowski_sum_volume_oracle(rng):
    for dim in (2, 3):
        A = convex_hull(random_hull_points(rng, dim, 14))
        B = convex_hull(random_hull_points(rng, dim, 10, spread=0.6))
        got = volume(minkowski_sum(A, B))
        want = minkowski_hull_volume(A.vertices, B.vertices)
        assert got == pytest.approx(want, rel=1e-9)


def test_minkowski_sum_dim_mismatch():
    with pytest.raises(BadParams):
        minkowski_sum(square(1.0), cube(1.0))


@given(seed=st.integers(0, 10**6))
def test_minkowski_support_additivity_property(seed):
    rng = np.random.default_rng(seed)
    A = convex_hull(random_hull_points(rng, 2, 10))
    B = convex_hull(random_hull_points(rng, 2, 8, spread=0.5))
    S = minkowski_sum(A, B)
    dirs = random_directions(rng, 2, 32)
    gap = np.abs(
        support_values(S, dirs) - support_values(A, dirs) - support_values(B, dirs)
    ).max()
    assert gap <= 1e-9 * max(1.0, A.diameter + B.diameter)


# -- nested pairs ------------------------------------------------------------


def test_nested_pair_valid():
    pair = NestedPair(square(1.0), square(3.0))
    assert pair.origin_interior
    assert pair.dim == 2
    assert pair.span == pytest.approx(6.0 * np.sqrt(2.0))


def test_nested_pair_rejects_reversed():
    with pytest.raises(NotNested):
        NestedPair(square(3.0), square(1.0))


def test_nested_pair_touching_needs_opt_in():
    with pytest.raises(NotNested):
        NestedPair(square(1.0), square(1.0))
    pair = NestedPair(square(1.0), square(1.0), allow_touching=True)
    assert pair.origin_interior


def test_nested_pair_origin_must_be_interior():
    shifted = square(1.0).translated(np.array([1.0, 0.0]))  # origin on its edge
    with pytest.raises(OriginNotInterior):
        NestedPair(shifted, square(5.0))


# -- arithmetic mean ---------------------------------------------------------


def test_arithmetic_mean_concentric_squares():
    mean = arithmetic_mean_body(NestedPair(square(1.0), square(3.0)))
    assert mean.kind == "arithmetic"
    assert mean.construction_route == "minkowski-hull"
    assert_same_vertex_set(mean.body.vertices, [[-2, -2], [-2, 2], [2, -2], [2, 2]], atol=1e-12)


def test_arithmetic_mean_identity():
    K = ngon(12, 1.3)
    mean = arithmetic_mean_body(NestedPair(K, K, allow_touching=True))
    assert_same_vertex_set(mean.body.vertices, K.vertices, atol=1e-12)


def test_arithmetic_mean_of_eps_offset_adds_half_support(rng):
    K0, ball = square(1.0), ngon(64, 0.3)
    pair = NestedPair(K0, minkowski_sum(K0, ball))
    mean = arithmetic_mean_body(pair)
    dirs = random_directions(rng, 2, 100)
    gap = np.abs(
        support_values(mean.body, dirs)
        - support_values(K0, dirs)
        - 0.5 * support_values(ball, dirs)
    ).max()
    assert gap <= 1e-9


# -- harmonic mean: radial map -----------------------------------------------


def test_harmonic_radial_closed_forms():
    pair = NestedPair(square(1.0), square(3.0))
    axis = harmonic_mean_radial(pair, np.array([1.0, 0.0]))
    assert np.allclose(axis, [1.5, 0.0], atol=1e-12)
    diag = harmonic_mean_radial(pair, np.array([1.0, 1.0]))
    # harmonic mean of sqrt(2) and 3*sqrt(2)
    assert np.linalg.norm(diag) == pytest.approx(1.5 * np.sqrt(2.0))
    assert np.allclose(diag, [1.5, 1.5], atol=1e-12)


def test_harmonic_radial_touching_ray():
    K = square(1.0)
    pair = NestedPair(K, K, allow_touching=True)
    u = np.array([0.6, -0.8])
    got = harmonic_mean_radial(pair, u)
    assert np.allclose(got, ray_boundary(K, np.zeros(2), u), atol=1e-12)


def test_harmonic_radial_is_harmonic_quadruple(rng):
    pair = random_pair(rng, 2, factor=2.4)
    origin = np.zeros(2)
    for u in random_directions(rng, 2, 50):
        c = harmonic_mean_radial(pair, u)
        b = ray_boundary(pair.inner, origin, u)
        d = ray_boundary(pair.outer, origin, u)
        assert abs(cross_ratio(origin, c, d, b) + 1.0) <= 1e-9


# -- harmonic mean: body construction ----------------------------------------


def test_harmonic_body_concentric_squares_exact():
    pair = NestedPair(square(1.0), square(3.0))
    hm = harmonic_mean_body(pair)
    assert hm.kind == "harmonic"
    assert hm.construction_route == "polar-of-arithmetic"
    assert_same_vertex_set(
        hm.body.vertices, [[-1.5, -1.5], [-1.5, 1.5], [1.5, -1.5], [1.5, 1.5]], atol=1e-12
    )
    origin = np.zeros(2)
    assert np.linalg.norm(
        ray_boundary(hm.body, origin, np.array([1.0, 0.0]))
    ) == pytest.approx(1.5)
    assert np.linalg.norm(
        ray_boundary(hm.body, origin, np.array([1.0, 1.0]))
    ) == pytest.approx(1.5 * np.sqrt(2.0))


def test_harmonic_body_3d_concentric_cubes():
    pair = NestedPair(cube(1.0), cube(3.0))
    hm = harmonic_mean_body(pair)
    assert np.allclose(np.abs(hm.body.vertices), 1.5, atol=1e-9)
    origin = np.zeros(3)
    assert np.linalg.norm(
        ray_boundary(hm.body, origin, np.array([1.0, 1.0, 1.0]))
    ) == pytest.approx(1.5 * np.sqrt(3.0))


def test_harmonic_body_identity():
    K = ngon(10, 0.8)
    pair = NestedPair(K, K, allow_touching=True)
    hm = harmonic_mean_body(pair)
    assert_same_vertex_set(hm.body.vertices, K.vertices, atol=1e-9)


def test_harmonic_body_routes_agree(rng):
    pair = random_pair(rng, 2, factor=2.0)
    exact = harmonic_mean_body(pair)
    sampled = harmonic_mean_body(pair, route="direct-radial", resolution=512)
    assert sampled.construction_route == "direct-radial"
    # The sampled hull is an inner approximation of the exact polytope.
    assert exact.body.residuals(sampled.body.vertices).max() <= 1e-9 * pair.span
    assert hausdorff_nested(sampled.body, exact.body) <= 2.0 * pair.span / 512


def test_harmonic_body_certified_between(rng):
    for dim, factor in ((2, 1.7), (3, 2.2)):
        pair = random_pair(rng, dim, factor=factor)
        hm = harmonic_mean_body(pair)
        slack = 1e-7 * pair.span
        assert hm.body.residuals(pair.inner.vertices).max() <= slack
        assert pair.outer.residuals(hm.body.vertices).max() <= slack
        dirs = random_directions(rng, dim, 64)
        assert harmonic_bundle_deviation(pair, hm.body, dirs) <= 1e-9


def test_harmonic_body_bad_route():
    pair = NestedPair(square(1.0), square(3.0))
    with pytest.raises(BadParams):
        harmonic_mean_body(pair, route="geometric")
    with pytest.raises(BadParams):
        harmonic_mean_body(pair, route="direct-radial", resolution=4)


# -- intersection volume helper ----------------------------------------------


def test_intersection_volume_closed_forms():
    K0 = square(1.0)
    KH = square(1.5)
    M = macbeath_body(KH, np.array([1.0, 0.0]), 0.5)
    assert volume(M) == pytest.approx(0.75)
    assert _intersection_volume(M, K0) == pytest.approx(0.375)

    K0c = cube(1.0)
    KHc = cube(1.5)
    Mc = macbeath_body(KHc, np.array([1.0, 0.0, 0.0]), 0.5)
    assert volume(Mc) == pytest.approx(1.125)
    assert _intersection_volume(Mc, K0c) == pytest.approx(0.5625)


def test_intersection_volume_monte_carlo(rng):
    A = convex_hull(random_hull_points(rng, 2, 12))
    B = convex_hull(random_hull_points(rng, 2, 12) + np.array([0.4, 0.1]))
    got = _intersection_volume(A, B)
    lo = np.minimum(A.bounding_box[0], B.bounding_box[0])
    hi = np.maximum(A.bounding_box[1], B.bounding_box[1])
    want = mc_overlap(A, B, n=400_000, seed=5) * float(np.prod(hi - lo))
    assert got == pytest.approx(want, rel=0.05)
    # disjoint translates give zero
    far = convex_hull(B.vertices + np.array([50.0, 0.0]))
    assert _intersection_volume(A, far) == 0.0


# -- fatness audit -----------------------------------------------------------


def test_fatness_equal_pair_is_one():
    K = square(1.0)
    pair = NestedPair(K, K, allow_touching=True)
    rep = fatness_audit(pair, K, n_boundary_pts=60, scales=(0.25, 1.0), seed=3)
    assert rep.min_ratio == 1.0
    assert all(v == 1.0 for v in rep.per_scale.values())
    assert rep.skipped == 0


def test_fatness_diamond_in_square_motivating_gap():
    pair = NestedPair(diamond(1.0), square(1.0), allow_touching=True)
    flat = fatness_audit(pair, pair.outer, n_boundary_pts=150, scales=(0.5,), seed=7)
    hm = harmonic_mean_body(pair)
    fat = fatness_audit(pair, hm, n_boundary_pts=150, scales=(0.5,), seed=7)
    # Regions of the outer square spill almost entirely outside the diamond
    # near its vertices; regions of the harmonic mean body do not.
    assert flat.min_ratio < 0.25
    assert fat.min_ratio > 1.5 * flat.min_ratio
    assert 0.0 < fat.min_ratio <= 1.0


def test_fatness_pancake_floor():
    K0 = box2(0.5, 0.05)
    pair = NestedPair(K0, minkowski_sum(K0, ngon(64, 0.05)))
    hm = harmonic_mean_body(pair)
    rep = fatness_audit(
        pair, hm, n_boundary_pts=120, scales=(0.125, 0.25, 0.5, 1.0), seed=11
    )
    assert rep.min_ratio >= 0.01
    assert all(0.0 < v <= 1.0 for v in rep.per_scale.values())
    audit = rep.to_audit_report()
    assert len(audit.rows) == 4
    assert audit.total_violations == 0
    assert {r.name for r in audit.rows} == {
        "fatness(0.125)",
        "fatness(0.25)",
        "fatness(0.5)",
        "fatness(1)",
    }


def test_fatness_scale_validation():
    pair = NestedPair(square(1.0), square(3.0))
    with pytest.raises(BadParams):
        fatness_audit(pair, pair.outer, n_boundary_pts=4, scales=(1.5,))


# -- chord-fraction audit ------------------------------------------------------


def test_chord_fraction_concentric_squares():
    pair = NestedPair(square(1.0), square(3.0))
    rep = hm_fat_aux_audit(pair, n_configs=1500, lambda_grid=(0.1, 0.3, 0.5), seed=0)
    row = rep.row("chord-inside-fraction")
    assert row.samples == 1500
    assert row.violations == 0
    assert row.min_const > 0.99


def test_chord_fraction_skinny_pairs(rng):
    pair = random_pair(rng, 2, n=20, factor=1.35, skinny=(1.0, 0.05))
    rep = hm_fat_aux_audit(pair, n_configs=800, lambda_grid=(0.1, 0.3, 0.5), seed=2)
    row = rep.row("chord-inside-fraction")
    assert row.violations == 0
    assert row.samples == 800

    pair3 = random_pair(rng, 3, n=24, factor=1.5, skinny=(1.0, 1.0, 0.08))
    rep3 = hm_fat_aux_audit(pair3, n_configs=400, lambda_grid=(0.1, 0.3, 0.5), seed=2)
    assert rep3.row("chord-inside-fraction").violations == 0


def test_chord_fraction_determinism():
    pair = NestedPair(square(1.0), square(3.0))
    a = hm_fat_aux_audit(pair, n_configs=200, seed=9).csv_rows()
    b = hm_fat_aux_audit(pair, n_configs=200, seed=9).csv_rows()
    assert a == b


def test_chord_fraction_validation():
    pair = NestedPair(square(1.0), square(3.0))
    with pytest.raises(BadParams):
        hm_fat_aux_audit(pair, n_configs=4, lambda_grid=())
    with pytest.raises(BadParams):
        hm_fat_aux_audit(pair, n_configs=4, lambda_grid=(1.0,))


# -- shadow-containment audit ---------------------------------------------------


BASE_SHADOW_ROWS = {
    "ray-exit-halfway",
    "shadow-volume-floor",
    "shadow-core-containment",
    "shadow-cone-containment",
}


def test_shadow_concentric_squares():
    pair = NestedPair(square(1.0), square(3.0))
    rep = shadow_containment_audit(pair, beta=0.5, n_pts=400, seed=0)
    assert {r.name for r in rep.rows} == BASE_SHADOW_ROWS  # no retry pass
    assert rep.total_violations == 0
    ray = rep.row("ray-exit-halfway")
    assert ray.samples == 400
    assert ray.max_const <= 1.0 + 1e-9


def test_shadow_volume_ratio_is_exact_at_beta_one():
    for pair in (
        NestedPair(square(1.0), square(3.0)),
        NestedPair(cube(1.0), cube(2.0)),
    ):
        rep = shadow_containment_audit(pair, beta=1.0, n_pts=40, seed=1)
        row = rep.row("shadow-volume-floor")
        # M' and M are affine copies of the same region: the ratio equals
        # (gamma/beta)^d = (1/240)^d identically.
        assert abs(row.min_const - 1.0) <= 1e-6
        assert abs(row.max_const - 1.0) <= 1e-6
        assert row.violations == 0


def test_shadow_random_pairs(rng):
    pair2 = random_pair(rng, 2, factor=1.9)
    rep2 = shadow_containment_audit(pair2, beta=0.5, n_pts=150, seed=4)
    assert rep2.total_violations == 0

    pair3 = random_pair(rng, 3, n=22, factor=1.6)
    rep3 = shadow_containment_audit(pair3, beta=0.75, n_pts=80, seed=4)
    assert rep3.total_violations == 0


def test_shadow_param_validation():
    pair = NestedPair(square(1.0), square(3.0))
    with pytest.raises(BadParams):
        shadow_containment_audit(pair, beta=0.0)
    with pytest.raises(BadParams):
        shadow_containment_audit(pair, beta=1.2)
    with pytest.raises(BadParams):
        shadow_containment_audit(pair, kappa=1.0)
