"""Macbeath regions, cross ratios, Hilbert distance, and their randomized audits.

The region M^lam(x) = x + lam((K - x) ∩ (x - K)) has a closed-form H-rep: each
halfspace <n, y> <= b of K contributes the pair
    <n, y>  <= lam b + (1 - lam) <n, x>        (from K - x)
    <-n, y> <= lam b - (1 + lam) <n, x>        (from x - K)
so the region needs at most twice the parent's halfspaces.  Cross ratios are
signed, with distances measured along one fixed orientation of the line; the
Hilbert distance is d(x, y) = ln(1 + r(x, y)) / 2 where r is the chord cross
ratio minus one.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import BadParams, CollinearityViolation, DegenerateQuadruple, NotInterior
from .geometry import (
    ConvexBody,
    halfspace_intersection_trusted,
    ray_boundary,
    unit,
    volume,
)
from .caps import Cap, cap_expand, min_volume_cap, ray_distance, support
from .reporting import AuditReport
from .sampling import random_directions


@dataclass
class MacbeathRegion:
    center: np.ndarray
    scale: float
    parent: ConvexBody
    hrep: ConvexBody = field(repr=False)


def macbeath_planes(K: ConvexBody, x, lam: float):
    """H-rep (normals, offsets) of M^lam(x), without redundancy filtering."""
    x = np.asarray(x, dtype=float)
    nx = K.normals @ x
    normals = np.vstack([K.normals, -K.normals])
    offsets = np.concatenate(
        [lam * K.offsets + (1.0 - lam) * nx, lam * K.offsets - (1.0 + lam) * nx]
    )
    return normals, offsets


def _filter_planes(K: ConvexBody, x, lam, normals, offsets):
    """Drop halfspaces that provably cannot touch the region.

    M^lam(x) sits inside the box x ± lam·e where e_j is the symmetric slack of
    K's bounding box around x, so any halfspace whose support over that box
    stays below its offset is redundant.  Only provably redundant planes are
    dropped; ties are kept.
    """
    lo, hi = K.bounding_box
    e = lam * np.minimum(hi - x, x - lo)
    box_support = normals @ x + np.abs(normals) @ np.maximum(e, 0.0)
    keep = box_support >= offsets - 1e-9 * K.scale
    if keep.sum() < K.dim + 1:
        return normals, offsets
    return normals[keep], offsets[keep]


def macbeath(K: ConvexBody, x, lam: float) -> MacbeathRegion:
    """The lam-scaled Macbeath region of K at interior point x."""
    x = np.asarray(x, dtype=float)
    if lam <= 0:
        raise BadParams("scale factor must be positive")
    if (K.normals @ x - K.offsets).max() > -K.tol.geom(K.scale):
        raise NotInterior("Macbeath regions need a strictly interior center")
    normals, offsets = macbeath_planes(K, x, lam)
    normals, offsets = _filter_planes(K, x, lam, normals, offsets)
    body = halfspace_intersection_trusted(normals, offsets, x, K.tol)
    return MacbeathRegion(center=x, scale=float(lam), parent=K, hrep=body)


def macbeath_body(K: ConvexBody, x, lam: float) -> ConvexBody:
    return macbeath(K, x, lam).hrep


# -- cross ratio and Hilbert distance ---------------------------------------


def _line_coordinates(points):
    """Project four points onto their common line; errors if not collinear."""
    pts = np.stack([np.atleast_1d(np.asarray(p, dtype=float)) for p in points])
    diffs = pts[:, None, :] - pts[None, :, :]
    dist = np.linalg.norm(diffs, axis=2)
    i, j = np.unravel_index(int(np.argmax(dist)), dist.shape)
    span = float(dist[i, j])
    if span <= 0:
        raise DegenerateQuadruple("all four points coincide")
    u = (pts[j] - pts[i]) / span
    rel = pts - pts[i]
    t = rel @ u
    perp = rel - t[:, None] * u[None, :]
    if np.linalg.norm(perp, axis=1).max() > 1e-9 * span:
        raise CollinearityViolation("points deviate from a common line")
    return t, span


def cross_ratio(a, b, c, d) -> float:
    """Signed cross ratio (a,b;c,d) = (ac/ad) / (bc/bd) on a common line.

    Distances are signed by one orientation of the line, so the result is
    orientation-independent but sign-carrying: harmonic quadruples give -1.
    """
    t, span = _line_coordinates((a, b, c, d))
    ta, tb, tc, td = t
    den = (td - ta) * (tc - tb)
    if abs(td - ta) <= 1e-12 * span or abs(tc - tb) <= 1e-12 * span:
        raise DegenerateQuadruple("cross ratio denominator vanishes")
    return float(((tc - ta) * (td - tb)) / den)


def _chord_splits(K: ConvexBody, x, y):
    """Distances (alpha, t, beta) along the chord through interior x and y:
    alpha back to the boundary, t = |y - x|, beta forward to the boundary."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    eps = K.tol.geom(K.scale)
    if (K.normals @ x - K.offsets).max() >= -eps or (K.normals @ y - K.offsets).max() >= -eps:
        raise NotInterior("Hilbert geometry is defined for strictly interior points")
    t = float(np.linalg.norm(y - x))
    if t == 0.0:
        return 1.0, 0.0, 1.0
    u = (y - x) / t
    a = ray_boundary(K, x, -u)
    b = ray_boundary(K, x, u)
    alpha = float(np.linalg.norm(x - a))
    beta = float(np.linalg.norm(b - x))
    if beta - t <= 0:
        raise NotInterior("chord endpoint does not clear the far boundary")
    return alpha, t, beta


def hilbert_distance(K: ConvexBody, x, y) -> float:
    """Hilbert distance induced by K between interior points x and y."""
    alpha, t, beta = _chord_splits(K, x, y)
    if t < 1e-10 * K.diameter:
        # first-order form; exact at t = 0 and smooth for tiny chords
        return 0.5 * t * (1.0 / alpha + 1.0 / beta)
    return 0.5 * (np.log1p(t / alpha) + np.log1p(t / (beta - t)))


def hilbert_ratio(K: ConvexBody, x, y) -> float:
    """Chord cross ratio minus one; satisfies d = ln(1 + r)/2."""
    alpha, t, beta = _chord_splits(K, x, y)
    if t == 0.0:
        return 0.0
    return float(np.expm1(np.log1p(t / alpha) + np.log1p(t / (beta - t))))


def hilbert_ball_point(K: ConvexBody, x, direction, r: float) -> np.ndarray:
    """The point at Hilbert distance r from x along the given chord direction."""
    x = np.asarray(x, dtype=float)
    u = unit(np.asarray(direction, dtype=float))
    a = ray_boundary(K, x, -u)
    b = ray_boundary(K, x, u)
    alpha = float(np.linalg.norm(x - a))
    beta = float(np.linalg.norm(b - x))
    big_e = float(np.exp(2.0 * r))
    t = alpha * beta * (big_e - 1.0) / (alpha * big_e + beta)
    return x + t * u


# -- audit -------------------------------------------------------------------


def _interior_point(K: ConvexBody, rng: np.random.Generator) -> np.ndarray:
    """Random strictly interior point, mixing hull mixtures and ray scaling."""
    eps = K.tol.geom(K.scale)
    for _ in range(12):
        if rng.uniform() < 0.5:
            w = rng.dirichlet(np.full(K.n_vertices, 0.6))
            p = w @ K.vertices
        else:
            bp = ray_boundary(K, np.zeros(K.dim), random_directions(rng, K.dim, 1)[0])
            p = float(rng.uniform(0.2, 0.995)) * bp
        if (K.normals @ p - K.offsets).max() < -eps:
            return p
    return K.vertices.mean(axis=0)


def _points_of(body: ConvexBody, rng: np.random.Generator, n: int) -> np.ndarray:
    w = rng.dirichlet(np.full(body.n_vertices, 0.6), size=n)
    return w @ body.vertices


def _shallow_point(K: ConvexBody, rng: np.random.Generator, lo: float, hi: float):
    """Point with relative ray distance in [lo, hi], by scaling a boundary hit."""
    bp = ray_boundary(K, np.zeros(K.dim), random_directions(rng, K.dim, 1)[0])
    s = 1.0 - float(rng.uniform(lo, hi))
    return s * bp


class _Row:
    def __init__(self):
        self.samples = 0
        self.violations = 0
        self.lo = np.inf
        self.hi = -np.inf

    def record(self, const: float, bad: bool):
        self.samples += 1
        self.violations += int(bad)
        self.lo = min(self.lo, const)
        self.hi = max(self.hi, const)

    def into(self, rep: AuditReport, name: str):
        rep.add(name, self.samples, self.violations, self.lo, self.hi)


def audit_macbeath_lemmas(
    K: ConvexBody, n_samples: int = 300, seed: int = 0, fault_scale: float | None = None
) -> AuditReport:
    """Randomized containment audits of the Macbeath-region inequalities.

    Containment rows (violations must be 0 for sound geometry):
      mac-overlap-proxy   two overlapping lam-regions (lam <= 1/5) nest into
                          the 4·lam region of either center
      mac-in-expanded-cap a 1/5-region meeting a cap fits in the doubled cap
      mac-cap-slice       M^lam(x) ∩ K fits in C^(1+lam) when x lies in C
      ray-similarity      points of a 1/5-region at a half-shallow center
                          have ray distance within [1/2, 2] of the center's
      translate-proxy     small translated copies of M(x) sit inside the
                          2·gamma region of the translate
      hilbert-ball-nesting Hilbert balls of radius ln(1+lam)/2 fit inside
                          M^lam(x); its points stay within ln((1+lam)/(1-lam))/2
      cap-in-base-region  a 1/3-shallow cap fits in M^(2d) of its base centroid
      boundary-cross-ratio chord ratio r(x, y) >= lam on the region boundary
    Ratio row (envelope check only): region-cap-volume, the volume ratio of
    M(p) to the near-minimal cap through a shallow p, bounded to [1e-3, 1e3].

    fault_scale deliberately rebuilds the overlap-proxy regions at the given
    scale while the expansion target keeps the sampled lam; used to prove the
    audit detects scale misuse.  Deterministic given (K, n_samples, seed).
    """
    rng = np.random.default_rng(seed)
    rep = AuditReport()
    d = K.dim
    scale = K.scale
    slack = K.tol.containment(scale)
    eps = K.tol.geom(scale)

    # Overlapping shrunken regions act as proxies for each other.
    row = _Row()
    guard = 0
    while row.samples < n_samples and guard < 20 * n_samples:
        guard += 1
        lam = float(rng.uniform(0.02, 0.2))
        build = lam if fault_scale is None else float(fault_scale)
        x = _interior_point(K, rng)
        mx = macbeath(K, x, build)
        if rng.uniform() < 0.5:
            y = _points_of(mx.hrep, rng, 1)[0]
            certified = True
        else:
            probe = _points_of(mx.hrep, rng, 1)[0]
            y = x + float(rng.uniform(1.0, 1.9)) * (probe - x)
            if (K.normals @ y - K.offsets).max() >= -eps:
                continue
            certified = False
        my = macbeath(K, y, build)
        if not certified:
            zs = np.vstack([_points_of(mx.hrep, rng, 8), x[None, :]])
            hits = (zs @ my.hrep.normals.T - my.hrep.offsets).max(axis=1) <= 0
            if not hits.any():
                continue
        target_n, target_b = macbeath_planes(K, x, 4.0 * lam)
        worst = float((my.hrep.vertices @ target_n.T - target_b).max())
        row.record(worst / scale, worst > slack)
    row.into(rep, "mac-overlap-proxy")

    # A 1/5-region touching a cap is swallowed by the doubled cap.
    row = _Row()
    guard = 0
    while row.samples < n_samples and guard < 20 * n_samples:
        guard += 1
        lam = 0.2 if fault_scale is None else float(fault_scale)
        x = _interior_point(K, rng)
        m = macbeath(K, x, lam)
        z = _points_of(m.hrep, rng, 1)[0]
        u = random_directions(rng, d, 1)[0]
        if float(u @ z) <= eps:
            u = -u
        cut = float(u @ z)
        if cut <= eps:
            continue
        cut -= float(rng.uniform(0.0, 0.3)) * cut
        if cut <= eps:
            continue
        try:
            cap = Cap(K, u, cut)
        except Exception:
            continue
        grown = cap_expand(cap, 2.0, allow_origin=True)
        margin = float((m.hrep.vertices @ grown.normal).min() - grown.cut)
        row.record(margin / max(cap.abs_width, 1e-300), margin < -slack)
    row.into(rep, "mac-in-expanded-cap")

    # M^lam(x) ∩ K inside the (1+lam)-expanded cap around x.
    row = _Row()
    guard = 0
    while row.samples < n_samples and guard < 20 * n_samples:
        guard += 1
        u = random_directions(rng, d, 1)[0]
        top = support(K, u)[0]
        try:
            cap = Cap(K, u, top * float(rng.uniform(0.08, 0.92)))
        except Exception:
            continue
        if cap.solid is None:
            continue
        x = _points_of(cap.solid, rng, 1)[0]
        if (K.normals @ x - K.offsets).max() >= -eps:
            continue
        lam = float(rng.uniform(0.05, 2.0))
        if lam <= 1.0:
            pts = macbeath(K, x, lam).hrep.vertices
        else:
            normals, offsets = macbeath_planes(K, x, lam)
            stacked_n = np.vstack([normals, K.normals])
            stacked_b = np.concatenate([offsets, K.offsets])
            pts = halfspace_intersection_trusted(stacked_n, stacked_b, x, K.tol).vertices
        grown = cap_expand(cap, 1.0 + lam, allow_origin=True)
        margin = float((pts @ grown.normal).min() - grown.cut)
        row.record(margin / max(cap.abs_width, 1e-300), margin < -slack)
    row.into(rep, "mac-cap-slice")

    # Ray distances inside a shrunken region stay within a factor two.
    row = _Row()
    for _ in range(n_samples):
        x = _shallow_point(K, rng, 0.005, 0.5)
        rx = ray_distance(K, x)
        m = macbeath(K, x, 0.2)
        y = _points_of(m.hrep, rng, 1)[0] if rng.uniform() < 0.5 else m.hrep.vertices[
            rng.integers(m.hrep.n_vertices)
        ]
        ry = ray_distance(K, y)
        bad = ry < rx / 2.0 - 1e-9 or ry > 2.0 * rx + 1e-9
        row.record(ry / max(rx, 1e-300), bad)
    row.into(rep, "ray-similarity")

    # Translated copies of M(x) are proxies for regions at the translate.
    row = _Row()
    for _ in range(n_samples):
        x = _interior_point(K, rng)
        base = macbeath(K, x, 1.0).hrep
        r_verts = base.vertices - x
        lam = float(rng.uniform(0.02, 0.5))
        gamma = float(rng.uniform(0.005, 0.1))
        w = rng.dirichlet(np.full(len(r_verts), 0.6))
        y = x + lam * (w @ r_verts)
        target_n, target_b = macbeath_planes(K, y, 2.0 * gamma)
        pts = y[None, :] + gamma * r_verts
        worst = float((pts @ target_n.T - target_b).max())
        row.record(worst / scale, worst > slack)
    row.into(rep, "translate-proxy")

    # Hilbert balls nest between region scalings.
    row = _Row()
    outer_probes = 3
    for _ in range(max(1, n_samples // (outer_probes + 2))):
        lam = float(rng.uniform(0.05, 0.9))
        x = _interior_point(K, rng)
        m = macbeath(K, x, lam)
        r_in = 0.5 * np.log1p(lam)
        r_out = 0.5 * np.log((1.0 + lam) / (1.0 - lam))
        for u in random_directions(rng, d, 2):
            y = hilbert_ball_point(K, x, u, r_in)
            worst = float((m.hrep.normals @ y - m.hrep.offsets).max())
            row.record(worst / scale, worst > slack)
        for v in _points_of(m.hrep, rng, outer_probes):
            y = x + (v - x) * (1.0 - 1e-12)
            try:
                dist = hilbert_distance(K, x, y)
            except NotInterior:
                continue
            row.record(dist / r_out, dist > r_out + 1e-9)
    row.into(rep, "hilbert-ball-nesting")

    # Shallow caps embed in the 2d-scaled region at their base centroid.
    row = _Row()
    guard = 0
    while row.samples < n_samples and guard < 20 * n_samples:
        guard += 1
        u = random_directions(rng, d, 1)[0]
        top = support(K, u)[0]
        try:
            cap = Cap(K, u, top * float(rng.uniform(0.67, 0.95)))
        except Exception:
            continue
        if cap.solid is None or len(cap.base_points) == 0:
            continue
        p = cap.base_centroid
        if (K.normals @ p - K.offsets).max() >= -eps:
            continue
        target_n, target_b = macbeath_planes(K, p, 2.0 * d)
        worst = float((cap.solid.vertices @ target_n.T - target_b).max())
        row.record(worst / scale, worst > slack)
    row.into(rep, "cap-in-base-region")

    # Boundary points of M^lam(x) have chord ratio at least lam.
    row = _Row()
    for _ in range(n_samples):
        lam = float(rng.uniform(0.05, 0.9))
        x = _interior_point(K, rng)
        m = macbeath(K, x, lam).hrep
        if rng.uniform() < 0.5:
            y = m.vertices[rng.integers(m.n_vertices)]
        else:
            e = m.edges[rng.integers(len(m.edges))]
            t = float(rng.uniform())
            y = (1 - t) * m.vertices[e[0]] + t * m.vertices[e[1]]
        y = x + (y - x) * (1.0 - 1e-12)
        try:
            r = hilbert_ratio(K, x, y)
        except NotInterior:
            continue
        row.record(r / lam, r < lam * (1.0 - 1e-6) - 1e-12)
    row.into(rep, "boundary-cross-ratio")

    # Volume comparability of M(p) and the near-minimal cap through p.
    row = _Row()
    n_ratio = min(n_samples, 16 if d == 2 else 6)
    grid = 240 if d == 2 else 600
    for _ in range(n_ratio):
        p = _shallow_point(K, rng, 0.03, 1.0 / 3.0)
        cap = min_volume_cap(K, p, n_dirs=grid, refine_rounds=2)
        ratio = volume(macbeath(K, p, 1.0).hrep) / max(cap.volume, 1e-300)
        row.record(ratio, not (1e-3 <= ratio <= 1e3))
    row.into(rep, "region-cap-volume")

    return rep
