"""Caps of a convex body: cuts by a halfspace kept on the side away from the origin.

A cap is stored as (body, normal, cut) with unit normal and the convention
that the cap is body ∩ {x : <normal, x> >= cut}.  Construction normalizes the
orientation of a given plane so the origin lands outside the cap, and refuses
caps that contain the origin unless the caller opts in.  Widths come in two
flavors: absolute (support gap along the normal) and relative (absolute
divided by the support value, defined only when the origin is outside).
"""

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import (
    BadParams,
    EmptyCap,
    NotContained,
    NotInterior,
    OriginInCap,
    SeedNotContained,
)
from .geometry import (
    ConvexBody,
    Hyperplane,
    clip_by_halfspace,
    clip_polygon,
    clipped_point_set,
    ray_boundary,
    support,
    unit,
    volume,
)
from .geometry import _any_perpendicular
from .reporting import AuditReport
from .sampling import grid_directions, random_directions


class Cap:
    """One halfspace cut of a convex body.

    The `solid` property materializes the cut region as a body and is cached;
    a cap whose kept region is numerically flat has solid None and volume 0.
    """

    def __init__(self, body: ConvexBody, normal, cut: float, allow_origin: bool = False):
        n = unit(np.asarray(normal, dtype=float))
        top, _ = support(body, n)
        bottom = -support(body, -n)[0]
        eps = body.tol.geom(body.scale)
        cut = float(cut)
        if top - cut <= eps:
            raise EmptyCap(f"cut {cut:.6g} at or beyond the support value {top:.6g}")
        if cut <= eps and not allow_origin:
            raise OriginInCap("cap contains the origin; pass allow_origin to permit this")
        self.body = body
        self.normal = n
        self.cut = cut
        self.top = float(top)
        self.contains_origin = bool(cut <= eps)
        self.equals_body = bool(cut <= bottom + eps)
        self._solid = None
        self._solid_done = False

    def __repr__(self):
        return f"Cap(cut={self.cut:.6g}, top={self.top:.6g}, dim={self.body.dim})"

    @property
    def abs_width(self) -> float:
        return self.top - self.cut

    @property
    def rel_width(self) -> float:
        if self.contains_origin:
            raise BadParams("relative width is undefined when the cap contains the origin")
        return (self.top - self.cut) / self.top

    @property
    def solid(self):
        if not self._solid_done:
            if self.equals_body:
                self._solid = self.body
            else:
                self._solid = clip_by_halfspace(self.body, Hyperplane(-self.normal, -self.cut))
            self._solid_done = True
        return self._solid

    @property
    def volume(self) -> float:
        s = self.solid
        return 0.0 if s is None else volume(s)

    @property
    def apex(self) -> np.ndarray:
        return support(self.body, self.normal)[1]

    @property
    def base_points(self) -> np.ndarray:
        """Vertices of the cap that lie on the cut plane."""
        s = self.solid
        if s is None:
            return np.zeros((0, self.body.dim))
        r = np.abs(s.vertices @ self.normal - self.cut)
        return s.vertices[r <= self.body.tol.containment(self.body.scale)]

    @property
    def base_centroid(self) -> np.ndarray:
        pts = self.base_points
        if len(pts) == 0:
            raise BadParams("cap has no base vertices on the cut plane")
        if self.body.dim == 2 or len(pts) < 3:
            return pts.mean(axis=0)
        return _planar_centroid(pts, self.normal)


def _planar_centroid(pts: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Area centroid of a planar point set's convex polygon (3D)."""
    e1 = _any_perpendicular(n)
    e2 = np.cross(n, e1)
    origin = pts[0]
    uv = np.stack([(pts - origin) @ e1, (pts - origin) @ e2], axis=1)
    order = np.argsort(np.arctan2(uv[:, 1] - uv[:, 1].mean(), uv[:, 0] - uv[:, 0].mean()))
    uv = uv[order]
    x, y = uv[:, 0], uv[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cr = x * yn - xn * y
    area2 = cr.sum()
    if abs(area2) < 1e-18:
        c = uv.mean(axis=0)
    else:
        c = np.array([((x + xn) * cr).sum(), ((y + yn) * cr).sum()]) / (3.0 * area2)
    return origin + c[0] * e1 + c[1] * e2


def make_cap(K: ConvexBody, plane: Hyperplane, allow_origin: bool = False) -> Cap:
    """Cap of K cut by the plane, oriented so the cap avoids the origin.

    When the plane separates the origin strictly, the kept side is forced to
    be the one not containing the origin.  A plane through the origin keeps
    the side its normal points to, and requires allow_origin.
    """
    n = np.asarray(plane.normal, dtype=float)
    norm = float(np.linalg.norm(n))
    if norm <= 0:
        raise BadParams("cap plane needs a nonzero normal")
    n = n / norm
    b = float(plane.offset) / norm
    if b < -K.tol.geom(K.scale):
        n, b = -n, -b
    return Cap(K, n, b, allow_origin=allow_origin)


def cap_expand(C: Cap, lam: float, allow_origin: bool = False) -> Cap:
    """Cap with the same direction and lam times the absolute width."""
    if lam <= 0:
        raise BadParams("expansion factor must be positive")
    new_cut = C.top - lam * C.abs_width
    return Cap(C.body, C.normal, new_cut, allow_origin=allow_origin)


def ray_distance(K: ConvexBody, p) -> float:
    """Relative distance from p to the boundary along the ray from the origin.

    Inside: fraction of the ray segment beyond p.  Outside: overshoot past the
    boundary relative to |p|.  Zero exactly on the boundary, and at the origin
    by convention.
    """
    p = np.asarray(p, dtype=float)
    r = float(np.linalg.norm(p))
    if r <= K.tol.geom(K.scale):
        return 0.0
    hit = ray_boundary(K, np.zeros(K.dim), p)
    t = float(np.linalg.norm(hit))
    if r <= t:
        return (t - r) / t
    return (r - t) / r


def min_width_cap(K: ConvexBody, p) -> Cap:
    """The minimum-relative-width cap whose cut plane passes through p.

    Realized by a facet normal at the boundary point that the ray from the
    origin through p hits; its relative width equals ray_distance(K, p).
    Among facets meeting the hit point, the one whose normal is closest in
    angle to the ray wins, lowest index on ties.
    """
    p = np.asarray(p, dtype=float)
    if np.linalg.norm(p) <= K.tol.geom(K.scale):
        raise BadParams("the ray through the origin is undefined at the origin itself")
    if (K.normals @ p - K.offsets).max() > -K.tol.geom(K.scale):
        raise NotInterior("p must be strictly interior to the body")
    hit = ray_boundary(K, np.zeros(K.dim), p)
    res = np.abs(K.normals @ hit - K.offsets)
    on = np.flatnonzero(res <= K.tol.containment(K.scale))
    if on.size == 0:
        on = np.array([int(np.argmin(res))])
    scores = K.normals[on] @ (p / np.linalg.norm(p))
    f = int(on[int(np.argmax(scores))])
    return Cap(K, K.normals[f], float(K.normals[f] @ p))


def cut_volume(K: ConvexBody, direction, cut: float) -> float:
    """Volume of K ∩ {<direction, x> >= cut}; 0 when empty or flat."""
    u = np.asarray(direction, dtype=float)
    if K.dim == 2:
        kept = clip_polygon(K.vertices, -u, -float(cut))
        if len(kept) < 3:
            return 0.0
        x, y = kept[:, 0], kept[:, 1]
        return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))
    pts = clipped_point_set(K, Hyperplane(-u, -float(cut)))
    if pts is None or len(pts) < 4:
        return 0.0
    try:
        return float(ConvexHull(pts).volume)
    except QhullError:
        return 0.0


def _golden_min(f, a: float, b: float, iters: int):
    """Golden-section minimizer on [a, b]; returns (argmin, min)."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def min_volume_cap(
    K: ConvexBody,
    p,
    n_dirs: int | None = None,
    refine_rounds: int = 3,
    allow_origin: bool = False,
) -> Cap:
    """Near-minimal-volume cap among cuts through the interior point p.

    Grid search over cut directions followed by local golden-section
    refinement of the direction.  For points that are not too deep, p ends up
    close to the area centroid of the returned cap's base.
    """
    p = np.asarray(p, dtype=float)
    if np.linalg.norm(p) <= K.tol.geom(K.scale):
        raise BadParams("min volume cap needs a point distinct from the origin")
    if (K.normals @ p - K.offsets).max() > -K.tol.geom(K.scale):
        raise NotInterior("p must be strictly interior to the body")
    d = K.dim
    if n_dirs is None:
        n_dirs = 720 if d == 2 else 2048

    def vol_of(u):
        v = cut_volume(K, u, float(u @ p))
        return v if v > 0 else np.inf

    dirs = grid_directions(d, n_dirs)
    vols = np.array([vol_of(u) for u in dirs])
    best = int(np.argmin(vols))
    u_best, v_best = dirs[best], float(vols[best])

    if d == 2:
        ang = float(np.arctan2(u_best[1], u_best[0]))
        h = 2.0 * np.pi / n_dirs
        for _ in range(refine_rounds):
            a, fa = _golden_min(
                lambda t: vol_of(np.array([np.cos(t), np.sin(t)])), ang - h, ang + h, 10
            )
            if fa < v_best:
                ang, v_best = a, fa
            h *= 0.3
        u_best = np.array([np.cos(ang), np.sin(ang)])
    else:
        h = 1.5 * np.sqrt(4.0 * np.pi / n_dirs)
        for _ in range(refine_rounds):
            e1 = _any_perpendicular(u_best)
            e2 = np.cross(u_best, e1)
            for axis in (e1, e2):
                a, fa = _golden_min(
                    lambda t: vol_of(unit(u_best + t * axis)), -h, h, 8
                )
                if fa < v_best:
                    u_best = unit(u_best + a * axis)
                    v_best = fa
            h *= 0.35
    return Cap(K, u_best, float(u_best @ p), allow_origin=allow_origin)


class ShadowRegion:
    """Points of the body whose origin ray passes through a seed subset.

    Membership is decided per point by intersecting the interval conditions
    that the segment from the origin to the point imposes on each halfspace
    of the seed body.
    """

    def __init__(self, body: ConvexBody, seed: ConvexBody, cone):
        self.body = body
        self.seed = seed
        self.cone = cone

    def membership(self, points) -> np.ndarray:
        X = np.atleast_2d(np.asarray(points, dtype=float))
        tol = self.body.tol
        scale = max(self.body.scale, self.seed.scale)
        eps = tol.geom(scale)
        inside = self.body.residuals(X).max(axis=1) <= tol.containment(scale)
        A = X @ self.seed.normals.T
        b = self.seed.offsets[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = b / A
        lo = np.where(A < -eps, ratio, -np.inf).max(axis=1)
        hi = np.where(A > eps, ratio, np.inf).min(axis=1)
        flat_bad = ((np.abs(A) <= eps) & (b < -eps)).any(axis=1)
        lo = np.maximum(lo, 0.0)
        hi = np.minimum(hi, 1.0)
        return inside & ~flat_bad & (lo <= hi + 1e-12)


def shadow(K: ConvexBody, seed: ConvexBody) -> ShadowRegion:
    """Shadow of a seed body contained in K, lit from the origin."""
    worst = float(K.residuals(seed.vertices).max())
    if worst > K.tol.containment(max(K.scale, seed.scale)):
        raise SeedNotContained(f"seed escapes the body by {worst:.3e}")
    try:
        from .geometry import convex_hull

        cone = convex_hull(np.vstack([np.zeros((1, K.dim)), seed.vertices]), K.tol)
    except Exception:
        cone = None
    return ShadowRegion(K, seed, cone)


def relative_volume(K: ConvexBody, region: ConvexBody) -> float:
    """vol(region) / vol(K) with a containment certificate first."""
    worst = float(K.residuals(region.vertices).max())
    if worst > K.tol.containment(max(K.scale, region.scale)):
        raise NotContained(f"region escapes the body by {worst:.3e}")
    return volume(region) / volume(K)


# -- audits ------------------------------------------------------------------


def _random_cap(K: ConvexBody, rng: np.random.Generator, depth=(0.08, 0.92)) -> Cap:
    """Random proper cap avoiding the origin: cut at a random fraction of top."""
    u = random_directions(rng, K.dim, 1)[0]
    top = support(K, u)[0]
    return Cap(K, u, top * rng.uniform(*depth))


def _points_in_cap(C: Cap, rng: np.random.Generator, n: int) -> np.ndarray:
    verts = C.solid.vertices
    w = rng.dirichlet(np.full(len(verts), 0.6), size=n)
    return w @ verts


def audit_cap_lemmas(K: ConvexBody, n_samples: int = 200, seed: int = 0) -> AuditReport:
    """Empirical checks of the cap inequalities on one body.

    Rows: cap-exp (expansion volume growth at most lam^d), raydist-width
    (relative ray distance at most relative cap width), cap-width-monotone
    (nested caps have ordered relative widths), min-vol-cap-width (the
    near-minimal volume cap through a shallow point is O(ray distance) wide).
    Violations are counted, never raised.
    """
    rng = np.random.default_rng(seed)
    rep = AuditReport()
    d = K.dim
    tol_rel = 1e-9

    # Expansion growth: vol(C^lam) <= lam^d vol(C), lam in [1, 4].
    viol = 0
    lo, hi = np.inf, -np.inf
    done = 0
    while done < n_samples:
        C = _random_cap(K, rng)
        lam = 1.0 if rng.uniform() < 0.1 else float(rng.uniform(1.0, 4.0))
        v0 = C.volume
        if v0 <= 0:
            continue
        v1 = cap_expand(C, lam, allow_origin=True).volume
        const = v1 / (lam**d * v0)
        lo, hi = min(lo, const), max(hi, const)
        if const > 1.0 + 1e-6:
            viol += 1
        done += 1
    rep.add("cap-exp", done, viol, lo, hi)

    # Ray distance bounded by cap width for points of the cap.
    viol = 0
    lo, hi = np.inf, -np.inf
    done = 0
    while done < n_samples:
        C = _random_cap(K, rng)
        if C.solid is None:
            continue
        k = min(3, n_samples - done)
        pts = _points_in_cap(C, rng, k)
        w = C.rel_width
        for p in pts:
            const = ray_distance(K, p) / w
            lo, hi = min(lo, const), max(hi, const)
            if const > 1.0 + tol_rel:
                viol += 1
            done += 1
    rep.add("raydist-width", done, viol, lo, hi)

    # Nested caps have monotone relative widths.
    viol = 0
    lo, hi = np.inf, -np.inf
    done = 0
    while done < n_samples:
        u = random_directions(rng, d, 1)[0]
        top = support(K, u)[0]
        c_outer = top * rng.uniform(0.08, 0.85)
        c_inner = float(rng.uniform(c_outer + 0.03 * top, top * 0.97))
        inner = Cap(K, u, c_inner)
        outer = Cap(K, u, c_outer)
        const = inner.rel_width / outer.rel_width
        lo, hi = min(lo, const), max(hi, const)
        if const > 1.0 + tol_rel:
            viol += 1
        done += 1
        if done >= n_samples:
            break
        # General pair: only scored when nestedness certifies.
        c1 = _random_cap(K, rng, depth=(0.4, 0.9))
        c2 = _random_cap(K, rng, depth=(0.1, 0.5))
        s1 = c1.solid
        if s1 is not None and (s1.vertices @ c2.normal - c2.cut).min() >= -K.tol.containment(K.scale):
            const = c1.rel_width / c2.rel_width
            lo, hi = min(lo, const), max(hi, const)
            if const > 1.0 + tol_rel:
                viol += 1
            done += 1
    rep.add("cap-width-monotone", done, viol, lo, hi)

    # Near-minimal volume caps through shallow points are O(ray) wide.
    n_mv = min(n_samples, 16 if d == 2 else 6)
    grid = 240 if d == 2 else 600
    bound = 2 * d + 1
    viol = 0
    lo, hi = np.inf, -np.inf
    for _ in range(n_mv):
        z = random_directions(rng, d, 1)[0]
        bp = ray_boundary(K, np.zeros(d), z)
        s = 1.0 - rng.uniform(0.03, 1.0 / 3.0)
        p = s * bp
        ray = ray_distance(K, p)
        C = min_volume_cap(K, p, n_dirs=grid, refine_rounds=2)
        const = C.rel_width / (bound * ray)
        lo, hi = min(lo, const), max(hi, const)
        if const > 1.02:
            viol += 1
    rep.add("min-vol-cap-width", n_mv, viol, lo, hi)
    return rep
