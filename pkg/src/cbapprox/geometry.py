"""Geometry kernel: convex polytopes in dimensions 2 and 3.

A body is carried in both representations at once: vertices and facet
halfspaces ``<n, x> <= b`` with unit outward normals, plus facet-to-vertex
incidence. Constructors build whichever side is missing. All predicates are
tolerance-parameterized and scale-relative, so bodies far from unit size
behave the same as unit ones.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError

from .errors import (
    BadParams,
    DegenerateInput,
    Infeasible,
    NotNested,
    OriginNotInterior,
    Unbounded,
)

ENV_TOL = "CBAPPROX_TOL"


@dataclass(frozen=True)
class Tolerance:
    """Two-level tolerance: eps_geom for predicates, eps_containment for certificates.

    Both are relative units; callers multiply by the local coordinate scale.
    """

    eps_geom: float = 1e-9
    eps_containment: float = 1e-7

    def __post_init__(self):
        if not (0.0 < self.eps_geom < self.eps_containment < 1e-3):
            raise BadParams(
                "tolerances must satisfy 0 < eps_geom < eps_containment < 1e-3"
            )

    def geom(self, scale: float = 1.0) -> float:
        return self.eps_geom * scale

    def containment(self, scale: float = 1.0) -> float:
        return self.eps_containment * scale


def default_tolerance() -> Tolerance:
    """Default tolerance, honoring the CBAPPROX_TOL override for eps_geom."""
    raw = os.environ.get(ENV_TOL)
    if raw is None:
        return Tolerance()
    return Tolerance(eps_geom=float(raw))


DEFAULT_TOL = Tolerance()


def unit(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(v))
    if n <= 0.0:
        raise BadParams("zero vector has no direction")
    return v / n


@dataclass(frozen=True)
class Hyperplane:
    """Oriented hyperplane {x : <normal, x> = offset} with unit normal."""

    normal: np.ndarray
    offset: float

    @classmethod
    def from_general(cls, normal, offset) -> "Hyperplane":
        normal = np.asarray(normal, dtype=float)
        n = float(np.linalg.norm(normal))
        if n <= 0.0:
            raise BadParams("hyperplane normal must be nonzero")
        return cls(normal / n, float(offset) / n)

    def residual(self, points: np.ndarray) -> np.ndarray:
        """Signed distance(s): positive outside the <= halfspace."""
        pts = np.asarray(points, dtype=float)
        return pts @ self.normal - self.offset

    def flipped(self) -> "Hyperplane":
        return Hyperplane(-self.normal, -self.offset)


class ConvexBody:
    """Bounded full-dimensional convex polytope with dual representation."""

    def __init__(self, vertices, normals, offsets, incidence, tol: Tolerance = DEFAULT_TOL):
        self.vertices = np.ascontiguousarray(vertices, dtype=float)
        self.normals = np.ascontiguousarray(normals, dtype=float)
        self.offsets = np.ascontiguousarray(offsets, dtype=float)
        self.incidence = incidence
        self.dim = self.vertices.shape[1]
        self.tol = tol
        self._cache: dict = {}
        if self.dim not in (2, 3):
            raise BadParams("only dimensions 2 and 3 are supported")
        if len(self.vertices) < self.dim + 1:
            raise DegenerateInput("a full-dimensional body needs at least d+1 vertices")

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_points(cls, points, tol: Tolerance = DEFAULT_TOL) -> "ConvexBody":
        return convex_hull(points, tol)

    @classmethod
    def from_ordered_polygon(cls, verts, tol: Tolerance = DEFAULT_TOL) -> "ConvexBody":
        """Build a 2D body from ccw-ordered polygon vertices without a hull call."""
        verts = np.asarray(verts, dtype=float)
        if verts.ndim != 2 or verts.shape[1] != 2 or len(verts) < 3:
            raise DegenerateInput("ordered polygon needs >= 3 planar vertices")
        area2 = _shoelace2(verts)
        if area2 < 0:
            verts = verts[::-1]
            area2 = -area2
        scale = max(1.0, float(np.abs(verts).max()))
        if area2 <= (tol.eps_geom * scale) ** 2:
            raise DegenerateInput("ordered polygon has vanishing area")
        nxt = np.roll(np.arange(len(verts)), -1)
        edges = verts[nxt] - verts
        normals = np.stack([edges[:, 1], -edges[:, 0]], axis=1)
        lens = np.linalg.norm(normals, axis=1)
        if lens.min() <= tol.eps_geom * scale:
            raise DegenerateInput("repeated vertex in ordered polygon")
        normals /= lens[:, None]
        offsets = np.einsum("ij,ij->i", normals, verts)
        incidence = [[i, int(nxt[i])] for i in range(len(verts))]
        return cls(verts, normals, offsets, incidence, tol)

    # -- cached structure --------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_facets(self) -> int:
        return len(self.normals)

    @property
    def scale(self) -> float:
        if "scale" not in self._cache:
            self._cache["scale"] = max(1.0, float(np.abs(self.vertices).max()))
        return self._cache["scale"]

    @property
    def origin_interior(self) -> bool:
        if "origin_interior" not in self._cache:
            slack = self.offsets.min()
            self._cache["origin_interior"] = bool(slack > self.tol.geom(self.scale))
        return self._cache["origin_interior"]

    @property
    def edges(self) -> np.ndarray:
        """Array of vertex index pairs, one row per edge."""
        if "edges" not in self._cache:
            if self.dim == 2:
                n = len(self.vertices)
                self._cache["edges"] = np.stack(
                    [np.arange(n), np.roll(np.arange(n), -1)], axis=1
                )
            else:
                seen = set()
                for cyc in self.facet_cycles:
                    for a, b in zip(cyc, np.roll(cyc, -1)):
                        seen.add((min(a, b), max(a, b)))
                self._cache["edges"] = np.array(sorted(seen), dtype=int)
        return self._cache["edges"]

    @property
    def facet_cycles(self) -> list:
        """Per-facet vertex index cycles, ccw as seen from outside (3D only)."""
        if "facet_cycles" not in self._cache:
            if self.dim == 2:
                self._cache["facet_cycles"] = [list(inc) for inc in self.incidence]
            else:
                cycles = []
                for f, inc in enumerate(self.incidence):
                    idx = np.asarray(inc, dtype=int)
                    pts = self.vertices[idx]
                    n = self.normals[f]
                    t1 = _any_perpendicular(n)
                    t2 = np.cross(n, t1)
                    ctr = pts.mean(axis=0)
                    ang = np.arctan2((pts - ctr) @ t2, (pts - ctr) @ t1)
                    order = np.argsort(ang)
                    cycles.append([int(idx[k]) for k in order])
                self._cache["facet_cycles"] = cycles
        return self._cache["facet_cycles"]

    @property
    def diameter(self) -> float:
        if "diameter" not in self._cache:
            self._cache["diameter"] = _max_pairwise_distance(self.vertices)
        return self._cache["diameter"]

    @property
    def bounding_box(self) -> tuple:
        if "bbox" not in self._cache:
            self._cache["bbox"] = (self.vertices.min(axis=0), self.vertices.max(axis=0))
        return self._cache["bbox"]

    def halfspaces(self) -> list:
        return [Hyperplane(self.normals[i], float(self.offsets[i])) for i in range(self.n_facets)]

    def residuals(self, points: np.ndarray) -> np.ndarray:
        """Facet residual matrix: (k, m) of <n_j, p_i> - b_j."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return pts @ self.normals.T - self.offsets

    def translated(self, shift: np.ndarray) -> "ConvexBody":
        shift = np.asarray(shift, dtype=float)
        return ConvexBody(
            self.vertices + shift,
            self.normals,
            self.offsets + self.normals @ shift,
            self.incidence,
            self.tol,
        )

    def scaled(self, factor: float) -> "ConvexBody":
        """Dilation about the origin by a positive factor."""
        if factor <= 0:
            raise BadParams("scaling factor must be positive")
        return ConvexBody(
            self.vertices * factor,
            self.normals,
            self.offsets * factor,
            self.incidence,
            self.tol,
        )

    def __repr__(self):
        return f"ConvexBody(dim={self.dim}, vertices={self.n_vertices}, facets={self.n_facets})"


# -- small numeric helpers -------------------------------------------------


def _shoelace2(verts: np.ndarray) -> float:
    x, y = verts[:, 0], verts[:, 1]
    return float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _any_perpendicular(n: np.ndarray) -> np.ndarray:
    a = np.zeros(3)
    a[int(np.argmin(np.abs(n)))] = 1.0
    t = np.cross(n, a)
    return t / np.linalg.norm(t)


def _max_pairwise_distance(pts: np.ndarray) -> float:
    best = 0.0
    step = 512
    for i in range(0, len(pts), step):
        blk = pts[i : i + step]
        d2 = ((blk[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        best = max(best, float(d2.max()))
    return math.sqrt(best)


def _dedup_rows(arr: np.ndarray, cell: float) -> np.ndarray:
    """Indices of representative rows, merging rows closer than ~cell.

    Uses two shifted rounding grids so near-boundary pairs still merge.
    """
    if len(arr) == 0:
        return np.arange(0)
    k1 = np.round(arr / cell).astype(np.int64)
    k2 = np.round(arr / cell + 0.5).astype(np.int64)
    seen: dict = {}
    keep = []
    for i in range(len(arr)):
        a, b = tuple(k1[i]), tuple(k2[i])
        if a in seen or b in seen:
            continue
        seen[a] = i
        seen[b] = i
        keep.append(i)
    return np.array(keep, dtype=int)


def _incidence_from_residuals(vertices, normals, offsets, inc_tol) -> list:
    res = np.abs(vertices @ normals.T - offsets)
    return [list(np.nonzero(res[:, j] <= inc_tol)[0]) for j in range(len(normals))]


# -- constructors ----------------------------------------------------------


def convex_hull(points, tol: Tolerance = DEFAULT_TOL) -> ConvexBody:
    """Convex hull of a point set as a ConvexBody.

    Raises DegenerateInput when the points are not full-dimensional.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] not in (2, 3):
        raise BadParams("points must be an (n, 2) or (n, 3) array")
    d = pts.shape[1]
    scale = max(1.0, float(np.abs(pts).max()) if len(pts) else 1.0)
    keep = _dedup_rows(pts, max(tol.geom(scale), 1e-13 * scale))
    pts = pts[keep]
    if len(pts) < d + 1:
        raise DegenerateInput("too few distinct points for a full-dimensional hull")
    centered = pts - pts.mean(axis=0)
    sv = np.linalg.svd(centered, compute_uv=False)
    if sv[-1] <= max(tol.geom(scale), 1e-12 * scale):
        raise DegenerateInput("points are rank-deficient within tolerance")
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise DegenerateInput(f"hull construction failed: {exc}") from exc
    verts = pts[hull.vertices]
    eq = hull.equations
    normals, offsets = eq[:, :d], -eq[:, d]
    lens = np.linalg.norm(normals, axis=1)
    normals = normals / lens[:, None]
    offsets = offsets / lens
    cell = 1e-8 * max(1.0, float(np.abs(offsets).max()))
    keep = _dedup_rows(np.hstack([normals, offsets[:, None]]), cell)
    normals, offsets = normals[keep], offsets[keep]
    inc_tol = 1e-7 * scale
    incidence = _incidence_from_residuals(verts, normals, offsets, inc_tol)
    ok = [j for j, inc in enumerate(incidence) if len(inc) >= d]
    normals, offsets = normals[ok], offsets[ok]
    incidence = [incidence[j] for j in ok]
    body = ConvexBody(verts, normals, offsets, incidence, tol)
    if d == 2:
        # Qhull returns 2D hull vertices in ccw order already; rebuild the
        # edge structure from that ordering so incidence is exact.
        return ConvexBody.from_ordered_polygon(verts, tol)
    return body


def _chebyshev_center(normals, offsets):
    """(center, radius) of the largest inscribed ball of an H-polytope."""
    m, d = normals.shape
    c = np.zeros(d + 1)
    c[-1] = -1.0
    A = np.hstack([normals, np.ones((m, 1))])
    res = linprog(c, A_ub=A, b_ub=offsets, bounds=[(None, None)] * (d + 1), method="highs")
    if not res.success:
        return None, -np.inf
    return res.x[:d], float(res.x[d])


def _has_recession_direction(normals, eps) -> bool:
    m, d = normals.shape
    bounds = [(-1.0, 1.0)] * d
    for j in range(d):
        for sgn in (1.0, -1.0):
            c = np.zeros(d)
            c[j] = -sgn
            res = linprog(c, A_ub=normals, b_ub=np.zeros(m), bounds=bounds, method="highs")
            if res.success and -res.fun > eps:
                return True
    return False


def halfspace_intersection(planes, interior_point=None, tol: Tolerance = DEFAULT_TOL) -> ConvexBody:
    """Intersect halfspaces <n, x> <= b into a bounded ConvexBody.

    Unboundedness is detected by recession-direction feasibility before any
    vertex enumeration. Raises Infeasible for an empty intersection and
    DegenerateInput for a lower-dimensional one.
    """
    if isinstance(planes, tuple) and len(planes) == 2:
        normals = np.asarray(planes[0], dtype=float)
        offsets = np.asarray(planes[1], dtype=float)
    else:
        normals = np.stack([p.normal for p in planes])
        offsets = np.array([p.offset for p in planes], dtype=float)
    if len(normals) < normals.shape[1] + 1:
        raise Unbounded("fewer than d+1 halfspaces cannot bound a body")
    lens = np.linalg.norm(normals, axis=1)
    if lens.min() <= 0:
        raise BadParams("halfspace normal must be nonzero")
    normals = normals / lens[:, None]
    offsets = offsets / lens
    scale = max(1.0, float(np.abs(offsets).max()))
    if _has_recession_direction(normals, tol.geom()):
        raise Unbounded("halfspace intersection admits a recession direction")
    center, radius = _chebyshev_center(normals, offsets)
    if center is None or radius < -tol.geom(scale):
        raise Infeasible("halfspace intersection is empty")
    if radius <= tol.geom(scale):
        raise DegenerateInput("halfspace intersection is lower-dimensional")
    ip = np.asarray(interior_point, dtype=float) if interior_point is not None else center
    if np.max(normals @ ip - offsets) >= -tol.geom(scale):
        ip = center
    try:
        hs = HalfspaceIntersection(np.hstack([normals, -offsets[:, None]]), ip)
    except QhullError as exc:
        raise DegenerateInput(f"halfspace intersection failed: {exc}") from exc
    return convex_hull(hs.intersections, tol)


def halfspace_intersection_trusted(normals, offsets, interior_point, tol: Tolerance = DEFAULT_TOL) -> ConvexBody:
    """Halfspace intersection for callers that certify boundedness and an
    interior point themselves; skips the recession and feasibility probes."""
    normals = np.asarray(normals, dtype=float)
    offsets = np.asarray(offsets, dtype=float)
    ip = np.asarray(interior_point, dtype=float)
    try:
        hs = HalfspaceIntersection(np.hstack([normals, -offsets[:, None]]), ip)
        return convex_hull(hs.intersections, tol)
    except (QhullError, DegenerateInput):
        # fall back to the fully guarded route, which recenters via Chebyshev
        return halfspace_intersection((normals, offsets), None, tol)


# -- measures --------------------------------------------------------------


def volume(K: ConvexBody) -> float:
    if "volume" in K._cache:
        return K._cache["volume"]
    if K.dim == 2:
        v = 0.5 * abs(_shoelace2(K.vertices))
    else:
        v = 0.0
        m = K.vertices.mean(axis=0)
        for f, cyc in enumerate(K.facet_cycles):
            pts = K.vertices[cyc] - m
            # fan triangles are ccw from outside, so signed volumes add up
            for i in range(1, len(pts) - 1):
                v += _orient_det(pts[0], pts[i], pts[i + 1], K.normals[f])
        v = abs(v) / 6.0
    K._cache["volume"] = v
    return v


def _orient_det(a, b, c, n) -> float:
    d = float(np.dot(np.cross(b - a, c - a), n))
    s = 1.0 if d >= 0 else -1.0
    return s * abs(float(np.dot(a, np.cross(b, c))))


def surface_area(K: ConvexBody) -> float:
    if "surface_area" in K._cache:
        return K._cache["surface_area"]
    if K.dim == 2:
        diffs = K.vertices - np.roll(K.vertices, -1, axis=0)
        s = float(np.linalg.norm(diffs, axis=1).sum())
    else:
        s = 0.0
        for cyc in K.facet_cycles:
            pts = K.vertices[cyc]
            for i in range(1, len(pts) - 1):
                s += 0.5 * float(
                    np.linalg.norm(np.cross(pts[i] - pts[0], pts[i + 1] - pts[0]))
                )
    K._cache["surface_area"] = s
    return s


def centroid(K: ConvexBody) -> np.ndarray:
    if "centroid" in K._cache:
        return K._cache["centroid"]
    if K.dim == 2:
        v = K.vertices
        x, y = v[:, 0], v[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        cross = x * yn - xn * y
        a = cross.sum() / 2.0
        cx = ((x + xn) * cross).sum() / (6.0 * a)
        cy = ((y + yn) * cross).sum() / (6.0 * a)
        c = np.array([cx, cy])
    else:
        m = K.vertices.mean(axis=0)
        acc = np.zeros(3)
        vol6 = 0.0
        for f, cyc in enumerate(K.facet_cycles):
            pts = K.vertices[cyc] - m
            for i in range(1, len(pts) - 1):
                a, b, cc = pts[0], pts[i], pts[i + 1]
                det = float(np.dot(a, np.cross(b, cc)))
                if np.dot(np.cross(b - a, cc - a), K.normals[f]) < 0:
                    det = -abs(det)
                else:
                    det = abs(det)
                vol6 += det
                acc += det * (a + b + cc) / 4.0
        c = m + acc / vol6
    K._cache["centroid"] = c
    return c


def support(K: ConvexBody, direction) -> tuple:
    """Support value and a witness vertex in the given direction."""
    u = np.asarray(direction, dtype=float)
    vals = K.vertices @ u
    i = int(np.argmax(vals))
    return float(vals[i]), K.vertices[i]


def support_values(K: ConvexBody, directions: np.ndarray) -> np.ndarray:
    return (np.asarray(directions, dtype=float) @ K.vertices.T).max(axis=1)


# -- point queries ---------------------------------------------------------


def contains(K: ConvexBody, point, slack: float | None = None) -> bool:
    p = np.asarray(point, dtype=float)
    if slack is None:
        slack = K.tol.containment(K.scale)
    return bool(np.max(K.normals @ p - K.offsets) <= slack)


def contains_all(K: ConvexBody, points, slack: float | None = None) -> bool:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if slack is None:
        slack = K.tol.containment(K.scale)
    return bool(K.residuals(pts).max() <= slack)


def ray_boundary(K: ConvexBody, origin, direction) -> np.ndarray:
    """First boundary point hit by the ray from an interior origin."""
    o = np.asarray(origin, dtype=float)
    u = np.asarray(direction, dtype=float)
    if np.linalg.norm(u) <= 0:
        raise BadParams("ray direction must be nonzero")
    res = K.normals @ o - K.offsets
    if res.max() > K.tol.geom(K.scale):
        raise OriginNotInterior("ray origin lies outside the body")
    denom = K.normals @ u
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(denom > K.tol.geom() * 1e-3, -res / denom, np.inf)
    tstar = float(t.min())
    if not np.isfinite(tstar) or tstar < 0:
        raise OriginNotInterior("ray does not exit the body; origin not interior")
    return o + tstar * u


def ray_boundary_many(K: ConvexBody, origin, directions) -> np.ndarray:
    """Vectorized ray_boundary for a matrix of directions."""
    o = np.asarray(origin, dtype=float)
    U = np.atleast_2d(np.asarray(directions, dtype=float))
    res = K.normals @ o - K.offsets
    if res.max() > K.tol.geom(K.scale):
        raise OriginNotInterior("ray origin lies outside the body")
    denom = U @ K.normals.T
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(denom > K.tol.geom() * 1e-3, -res[None, :] / denom, np.inf)
    tstar = t.min(axis=1)
    return o + tstar[:, None] * U


def disjoint(A: ConvexBody, B: ConvexBody) -> bool:
    """True when the bodies have definitely no common point.

    Decided by slack maximization over the combined halfspace system; any
    slack above -eps_geom counts as intersecting, which errs toward overlap.
    """
    lo_a, hi_a = A.bounding_box
    lo_b, hi_b = B.bounding_box
    scale = max(A.scale, B.scale)
    eps = A.tol.geom(scale)
    if np.any(lo_a > hi_b + eps) or np.any(lo_b > hi_a + eps):
        return True
    N = np.vstack([A.normals, B.normals])
    b = np.concatenate([A.offsets, B.offsets])
    _, r = _chebyshev_center(N, b)
    return r <= -eps


def closest_point(K: ConvexBody, point) -> tuple:
    """Distance to the body and the nearest body point (0 and p if inside)."""
    p = np.asarray(point, dtype=float)
    res = K.normals @ p - K.offsets
    worst = float(res.max())
    if worst <= 0.0:
        return 0.0, p
    if K.dim == 2:
        a = K.vertices
        b = np.roll(K.vertices, -1, axis=0)
        return _closest_on_segments(p, a, b)
    # Try facet-interior projection on the most violated facets first.
    best = None
    order = np.argsort(-res)
    for f in order:
        if res[f] <= 0:
            break
        proj = p - res[f] * K.normals[f]
        if _point_in_facet(K, f, proj):
            best = (float(res[f]), proj)
            break
    a = K.vertices[K.edges[:, 0]]
    b = K.vertices[K.edges[:, 1]]
    dist_e, q_e = _closest_on_segments(p, a, b)
    if best is None or dist_e < best[0]:
        best = (dist_e, q_e)
    return best


def _closest_on_segments(p, a, b):
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    denom = np.where(denom <= 0, 1.0, denom)
    t = np.clip(np.einsum("ij,ij->i", p[None, :] - a, ab) / denom, 0.0, 1.0)
    q = a + t[:, None] * ab
    d = np.linalg.norm(q - p[None, :], axis=1)
    i = int(np.argmin(d))
    return float(d[i]), q[i]


def _point_in_facet(K: ConvexBody, f: int, q: np.ndarray) -> bool:
    cyc = K.facet_cycles[f]
    pts = K.vertices[cyc]
    n = K.normals[f]
    prev = pts
    nxt = np.roll(pts, -1, axis=0)
    cr = np.cross(nxt - prev, q[None, :] - prev)
    s = cr @ n
    return bool((s >= -K.tol.geom(K.scale)).all() or (s <= K.tol.geom(K.scale)).all())


def distance_to_body(K: ConvexBody, point) -> float:
    return closest_point(K, point)[0]


def hausdorff_nested(inner: ConvexBody, outer: ConvexBody) -> float:
    """Hausdorff distance between nested bodies; raises NotNested otherwise."""
    scale = max(inner.scale, outer.scale)
    worst = outer.residuals(inner.vertices).max()
    if worst > outer.tol.containment(scale):
        raise NotNested(f"inner body escapes outer by {worst:.3e}")
    return max(distance_to_body(inner, v) for v in outer.vertices)


# -- clipping --------------------------------------------------------------


def clip_polygon(verts: np.ndarray, normal: np.ndarray, offset: float):
    """Clip an ordered convex polygon against <n, x> <= b; keeps ordering.

    Returns the clipped ordered vertex array, possibly with fewer than 3 rows
    when the kept region is empty or degenerate.
    """
    r = verts @ normal - offset
    keep = r <= 0.0
    if keep.all():
        return verts
    if not keep.any():
        return verts[:0]
    out = []
    n = len(verts)
    for i in range(n):
        j = (i + 1) % n
        if keep[i]:
            out.append(verts[i])
        if keep[i] != keep[j]:
            t = r[i] / (r[i] - r[j])
            out.append(verts[i] + t * (verts[j] - verts[i]))
    out = np.asarray(out)
    if len(out) >= 2:
        d = np.linalg.norm(out - np.roll(out, -1, axis=0), axis=1)
        cell = 1e-12 * max(1.0, float(np.abs(out).max()))
        out = out[d > cell]
    return out


def clip_by_halfspace(K: ConvexBody, plane: Hyperplane):
    """Body cut to the <= side of a plane; None when empty or flat."""
    if K.dim == 2:
        kept = clip_polygon(K.vertices, plane.normal, plane.offset)
        if len(kept) < 3:
            return None
        try:
            return ConvexBody.from_ordered_polygon(kept, K.tol)
        except DegenerateInput:
            return None
    pts = clipped_point_set(K, plane)
    if pts is None or len(pts) < 4:
        return None
    try:
        return convex_hull(pts, K.tol)
    except DegenerateInput:
        return None


def clipped_point_set(K: ConvexBody, plane: Hyperplane):
    """Vertex set of K cut by one halfspace: kept vertices + edge crossings."""
    r = plane.residual(K.vertices)
    keep = r <= 0.0
    if keep.all():
        return K.vertices
    if not keep.any():
        return None
    e = K.edges
    ra, rb = r[e[:, 0]], r[e[:, 1]]
    crossing = (ra > 0) != (rb > 0)
    a = K.vertices[e[crossing, 0]]
    b = K.vertices[e[crossing, 1]]
    t = (ra[crossing] / (ra[crossing] - rb[crossing]))[:, None]
    cuts = a + t * (b - a)
    return np.vstack([K.vertices[keep], cuts])


# -- body files ------------------------------------------------------------


def body_to_dict(K: ConvexBody, rep: str = "vertices") -> dict:
    if rep == "vertices":
        return {"dim": K.dim, "vertices": K.vertices.tolist()}
    if rep == "halfspaces":
        return {
            "dim": K.dim,
            "halfspaces": [
                {"normal": K.normals[i].tolist(), "offset": float(K.offsets[i])}
                for i in range(K.n_facets)
            ],
        }
    raise BadParams("rep must be 'vertices' or 'halfspaces'")


def body_from_dict(doc: dict, tol: Tolerance = DEFAULT_TOL) -> ConvexBody:
    if "dim" not in doc:
        raise BadParams("body document needs a 'dim' field")
    d = int(doc["dim"])
    if "vertices" in doc:
        pts = np.asarray(doc["vertices"], dtype=float)
        if pts.ndim != 2 or pts.shape[1] != d:
            raise BadParams("vertex rows must match the declared dimension")
        return convex_hull(pts, tol)
    if "halfspaces" in doc:
        planes = [
            Hyperplane.from_general(h["normal"], h["offset"]) for h in doc["halfspaces"]
        ]
        if any(len(p.normal) != d for p in planes):
            raise BadParams("halfspace normals must match the declared dimension")
        return halfspace_intersection(planes, tol=tol)
    raise BadParams("body document needs 'vertices' or 'halfspaces'")


def save_body(K: ConvexBody, path: str, rep: str = "vertices") -> None:
    with open(path, "w") as fh:
        json.dump(body_to_dict(K, rep), fh, indent=1)


def load_body(path: str, tol: Tolerance = DEFAULT_TOL) -> ConvexBody:
    with open(path) as fh:
        return body_from_dict(json.load(fh), tol)
