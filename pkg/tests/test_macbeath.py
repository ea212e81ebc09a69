import numpy as np
import pytest

from cbapprox.errors import (
    BadParams,
    CollinearityViolation,
    DegenerateQuadruple,
    NotInterior,
)
from cbapprox.geometry import ConvexBody, convex_hull, volume
from cbapprox.macbeath import (
    audit_macbeath_lemmas,
    cross_ratio,
    hilbert_ball_point,
    hilbert_distance,
    hilbert_ratio,
    macbeath,
    macbeath_body,
    macbeath_planes,
)
from cbapprox.sampling import random_directions

from conftest import random_hull_points
from oracles import mc_volume

SQUARE = ConvexBody.from_points(np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]]))


def _vertex_set_equal(a, b, tol):
    if len(a) != len(b):
        return False
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return bool(d.min(axis=1).max() <= tol and d.min(axis=0).max() <= tol)


def test_square_region_full_scale():
    m = macbeath(SQUARE, [0.5, 0.0], 1.0)
    want = np.array([[0.0, 1.0], [0.0, -1.0], [1.0, 1.0], [1.0, -1.0]])
    assert _vertex_set_equal(m.hrep.vertices, want, 1e-9)
    assert m.scale == 1.0
    assert m.parent is SQUARE


def test_square_region_half_scale():
    m = macbeath_body(SQUARE, [0.5, 0.0], 0.5)
    want = np.array([[0.25, 0.5], [0.25, -0.5], [0.75, 0.5], [0.75, -0.5]])
    assert _vertex_set_equal(m.vertices, want, 1e-9)
    assert volume(m) == pytest.approx(0.5)


def test_centered_region_is_whole_body():
    m = macbeath_body(SQUARE, [0.0, 0.0], 1.0)
    assert _vertex_set_equal(m.vertices, SQUARE.vertices, 1e-9)


def test_region_preconditions():
    with pytest.raises(NotInterior):
        macbeath(SQUARE, [1.5, 0.0], 0.5)
    with pytest.raises(NotInterior):
        macbeath(SQUARE, [1.0, 0.0], 0.5)
    with pytest.raises(BadParams):
        macbeath(SQUARE, [0.1, 0.1], 0.0)


def test_region_symmetry_containment_and_plane_budget(rng):
    for dim in (2, 3):
        for _ in range(6):
            K = convex_hull(random_hull_points(rng, dim, 30))
            if not K.origin_interior:
                continue
            w = rng.dirichlet(np.full(K.n_vertices, 0.5))
            x = 0.95 * (w @ K.vertices)
            lam = float(rng.uniform(0.1, 1.0))
            m = macbeath(K, x, lam)
            reflected = 2.0 * x - m.hrep.vertices
            assert _vertex_set_equal(m.hrep.vertices, reflected, 1e-9 * K.diameter)
            assert K.residuals(m.hrep.vertices).max() <= K.tol.containment(K.scale)
            assert m.hrep.n_facets <= 2 * K.n_facets
            planes = macbeath_planes(K, x, lam)
            assert len(planes[0]) == 2 * K.n_facets


def test_full_region_is_maximal(rng):
    for _ in range(6):
        K = convex_hull(random_hull_points(rng, 2, 25))
        if not K.origin_interior:
            continue
        x = 0.7 * K.vertices[int(rng.integers(K.n_vertices))]
        m = macbeath_body(K, x, 1.0)
        inflated = x + 1.01 * (m.vertices - x)
        assert K.residuals(inflated).max() > 0


def test_region_volume_against_mc(rng):
    K = convex_hull(random_hull_points(rng, 2, 20))
    m = macbeath_body(K, 0.4 * K.vertices[0], 0.8)
    assert volume(m) == pytest.approx(mc_volume(m, n=400_000), rel=0.02)


def test_cross_ratio_line_example():
    a, d, b, c = 0.0, 1.0, 2.0, 4.0
    got = cross_ratio([a], [b], [c], [d])
    assert got == pytest.approx(-2.0, abs=1e-12)


def test_cross_ratio_harmonic_example():
    got = cross_ratio([0.0], [1.5], [3.0], [1.0])
    assert got == pytest.approx(-1.0, abs=1e-12)


def test_cross_ratio_far_point_limit():
    got = cross_ratio([1e9], [1.0], [0.0], [2.0])
    assert got == pytest.approx(-1.0, abs=1e-6)


def test_cross_ratio_rejects_bad_input():
    with pytest.raises(CollinearityViolation):
        cross_ratio([0.0, 0.0], [1.0, 0.0], [2.0, 0.5], [3.0, 0.0])
    with pytest.raises(DegenerateQuadruple):
        cross_ratio([0.0], [1.0], [2.0], [0.0])


def test_cross_ratio_projective_invariance(rng):
    for _ in range(20):
        t = np.sort(rng.uniform(-3, 3, size=4))
        t = t[[0, 2, 1, 3]]
        o = rng.normal(size=2)
        v = random_directions(rng, 2, 1)[0]
        pts = [o + ti * v for ti in t]
        base = cross_ratio(*pts)
        p, q, r, s = rng.uniform(-2, 2, size=4)
        if abs(p * s - q * r) < 0.1:
            continue
        mapped_t = (p * t + q) / (r * t + s)
        if np.abs(r * t + s).min() < 0.1:
            continue
        mapped = [o + mi * v for mi in mapped_t]
        assert cross_ratio(*mapped) == pytest.approx(base, rel=1e-8, abs=1e-10)


def test_hilbert_distance_square_closed_form():
    assert hilbert_distance(SQUARE, [0.0, 0.0], [0.5, 0.0]) == pytest.approx(
        0.5 * np.log(3.0), abs=1e-12
    )
    assert hilbert_distance(SQUARE, [0.3, 0.1], [0.3, 0.1]) == 0.0
    with pytest.raises(NotInterior):
        hilbert_distance(SQUARE, [0.0, 0.0], [1.0, 0.0])


def test_hilbert_distance_metric_properties(rng):
    K = convex_hull(random_hull_points(rng, 2, 20))
    for _ in range(25):
        w = rng.dirichlet(np.full(K.n_vertices, 0.7), size=3)
        x, y, z = 0.97 * (w @ K.vertices)
        dxy = hilbert_distance(K, x, y)
        assert dxy == pytest.approx(hilbert_distance(K, y, x), abs=1e-11)
        assert hilbert_distance(K, x, z) <= dxy + hilbert_distance(K, y, z) + 1e-9
        r = hilbert_ratio(K, x, y)
        assert dxy == pytest.approx(0.5 * np.log1p(r), abs=1e-10)


def test_hilbert_ball_point_hits_requested_distance(rng):
    K = convex_hull(random_hull_points(rng, 2, 18))
    x = 0.3 * K.vertices[0]
    for _ in range(10):
        u = random_directions(rng, 2, 1)[0]
        r = float(rng.uniform(0.05, 1.5))
        y = hilbert_ball_point(K, x, u, r)
        assert hilbert_distance(K, x, y) == pytest.approx(r, abs=1e-10)


def test_hilbert_ball_probe_inside_region():
    x = np.array([0.3, 0.2])
    lam = 0.5
    m = macbeath_body(SQUARE, x, lam)
    r_in = 0.5 * np.log1p(lam)
    for u in random_directions(np.random.default_rng(7), 2, 1000):
        y = hilbert_ball_point(SQUARE, x, u, r_in)
        assert m.residuals(y[None, :]).max() <= SQUARE.tol.containment(SQUARE.scale)


def test_boundary_points_have_large_ratio(rng):
    K = convex_hull(random_hull_points(rng, 2, 20))
    for _ in range(15):
        lam = float(rng.uniform(0.1, 0.9))
        x = 0.5 * K.vertices[int(rng.integers(K.n_vertices))]
        m = macbeath_body(K, x, lam)
        v = m.vertices[int(rng.integers(m.n_vertices))]
        r = hilbert_ratio(K, x, x + (v - x) * (1 - 1e-12))
        assert r >= lam * (1.0 - 1e-6)


def test_audit_clean_on_square_and_gon(rng):
    twelve = convex_hull(random_hull_points(rng, 2, 12))
    for K in (SQUARE, twelve):
        rep = audit_macbeath_lemmas(K, n_samples=250, seed=5)
        containment = [
            "mac-overlap-proxy",
            "mac-in-expanded-cap",
            "mac-cap-slice",
            "ray-similarity",
            "translate-proxy",
            "hilbert-ball-nesting",
            "cap-in-base-region",
            "boundary-cross-ratio",
        ]
        for name in containment:
            r = rep.row(name)
            assert r.violations == 0, name
            assert r.samples >= 200
        ratio = rep.row("region-cap-volume")
        assert ratio.violations == 0
        assert 1e-3 <= ratio.min_const <= ratio.max_const <= 1e3


def test_audit_runs_in_three_dimensions():
    cube = ConvexBody.from_points(
        np.array(np.meshgrid([-1, 1], [-1, 1], [-1, 1])).reshape(3, -1).T.astype(float)
    )
    rep = audit_macbeath_lemmas(cube, n_samples=60, seed=11)
    assert rep.total_violations == 0


def test_audit_detects_scale_misuse():
    rep = audit_macbeath_lemmas(SQUARE, n_samples=120, seed=3, fault_scale=0.3)
    assert rep.row("mac-overlap-proxy").violations > 0


def test_audit_deterministic():
    a = audit_macbeath_lemmas(SQUARE, n_samples=80, seed=9)
    b = audit_macbeath_lemmas(SQUARE, n_samples=80, seed=9)
    assert a.csv_rows() == b.csv_rows()
