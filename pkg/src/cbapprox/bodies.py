"""Generators for benchmark convex bodies.

Families cover the regimes the facet-count experiments probe: round bodies
(``ball``, ``ellipsoid``), boxy bodies (``box``, ``simplex``), bodies thin in
one direction (``pancake``) or in all but one direction (``pencil``), and
seeded random hulls.  Every generated body is recentered at its centroid, so
the origin is strictly interior and polar-based pipelines can run directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .errors import BadParams
from .polar import recenter_to_centroid
from .sampling import circle_directions, fibonacci_sphere

FAMILY_NAMES = (
    "ball",
    "box",
    "pancake",
    "pencil",
    "ellipsoid",
    "simplex",
    "randomHull",
)

# Default direction counts for polytopal approximants of smooth bodies.
DEFAULT_RESOLUTION = {2: 256, 3: 512}


@dataclass(frozen=True)
class BodyFamily:
    """A named body generator plus its family-specific real parameters.

    ``resolution`` is the direction count used by smooth approximants
    (``ball``/``ellipsoid``); 0 means the per-dimension default.
    """

    name: str
    params: dict = field(default_factory=dict)
    resolution: int = 0

    def __post_init__(self):
        if self.name not in FAMILY_NAMES:
            raise BadParams(
                f"unknown body family {self.name!r}; expected one of {FAMILY_NAMES}"
            )
        if self.resolution < 0:
            raise BadParams("resolution must be nonnegative")


def polytopal_ball(
    dim: int, radius: float = 1.0, resolution: int | None = None
) -> tuple[geo.ConvexBody, float]:
    """Inscribed polytopal approximation of the ball of the given radius.

    Returns the hull of ``resolution`` sphere points together with the
    relative inradius defect ``1 - inradius/radius``.  The hull is contained
    in the true ball, so Minkowski sums built from it never overshoot the
    intended rounding radius.
    """
    if dim not in (2, 3):
        raise BadParams(f"dimension must be 2 or 3, got {dim}")
    if radius <= 0:
        raise BadParams("radius must be positive")
    res = DEFAULT_RESOLUTION[dim] if resolution is None else int(resolution)
    if res < dim + 2:
        raise BadParams(f"resolution {res} too small for a full-dimensional hull")
    dirs = circle_directions(res) if dim == 2 else fibonacci_sphere(res)
    body = geo.convex_hull(dirs * radius)
    defect = 1.0 - float(body.offsets.min()) / radius
    return body, defect


def _box(sides) -> geo.ConvexBody:
    sides = np.asarray(sides, dtype=float)
    if np.any(sides <= 0):
        raise BadParams("box sides must be positive")
    dim = len(sides)
    corners = np.array(
        [[(s if (i >> k) & 1 else 0.0) for k, s in enumerate(sides)] for i in range(2**dim)]
    )
    return geo.convex_hull(corners)


def _simplex(dim: int) -> geo.ConvexBody:
    if dim == 2:
        ang = 2.0 * np.pi * np.arange(3) / 3.0
        pts = np.column_stack([np.cos(ang), np.sin(ang)])
    else:
        pts = np.array(
            [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
        ) / np.sqrt(3.0)
    return geo.convex_hull(pts)


def _ellipsoid(dim: int, axes, resolution: int) -> geo.ConvexBody:
    axes = np.asarray(axes, dtype=float)
    if len(axes) != dim:
        raise BadParams(f"ellipsoid needs {dim} semi-axes, got {len(axes)}")
    if np.any(axes <= 0):
        raise BadParams("ellipsoid semi-axes must be positive")
    dirs = circle_directions(resolution) if dim == 2 else fibonacci_sphere(resolution)
    return geo.convex_hull(dirs * axes)


def _thin_sides(dim: int, t: float, thin_axes: int) -> np.ndarray:
    """Unit box sides with the trailing ``thin_axes`` dimensions shrunk to t."""
    if not 0 < t <= 1.0:
        raise BadParams(f"thickness must lie in (0, 1], got {t}")
    sides = np.ones(dim)
    sides[dim - thin_axes :] = t
    return sides


def generate(family, dim: int, seed: int = 0, **params) -> geo.ConvexBody:
    """Build a recentered benchmark body of the requested family.

    ``family`` is a :class:`BodyFamily` or a family name; keyword params
    override/extend the family's stored ones (``resolution`` included).
    Pass ``min_width`` to assert the generated body is at least that wide in
    every direction (useful when a later approximation stage requires a
    minimum width); violations raise :class:`BadParams`.
    """
    if isinstance(family, str):
        family = BodyFamily(family, {}, 0)
    if dim not in (2, 3):
        raise BadParams(f"dimension must be 2 or 3, got {dim}")
    merged = dict(family.params)
    merged.update(params)
    resolution = int(merged.pop("resolution", 0) or family.resolution or DEFAULT_RESOLUTION[dim])
    min_width = merged.pop("min_width", None)
    name = family.name

    if name == "ball":
        radius = float(merged.pop("radius", 1.0))
        body, _ = polytopal_ball(dim, radius, resolution)
    elif name == "box":
        sides = merged.pop("sides", np.ones(dim))
        body = _box(np.broadcast_to(np.asarray(sides, dtype=float), (dim,)))
    elif name == "pancake":
        t = float(merged.pop("t", 0.1))
        body = _box(_thin_sides(dim, t, 1))
    elif name == "pencil":
        t = float(merged.pop("t", 0.1))
        body = _box(_thin_sides(dim, t, max(1, dim - 1)))
    elif name == "ellipsoid":
        axes = merged.pop("axes", (1.0, 0.6) if dim == 2 else (1.0, 0.7, 0.4))
        body = _ellipsoid(dim, axes, resolution)
    elif name == "simplex":
        body = _simplex(dim)
    elif name == "randomHull":
        n_points = int(merged.pop("n_points", 100))
        if n_points < dim + 1:
            raise BadParams(f"randomHull needs at least {dim + 1} points")
        rng = np.random.default_rng(seed)
        body = geo.convex_hull(rng.standard_normal((n_points, dim)))
    else:  # pragma: no cover - BodyFamily already validates names
        raise BadParams(f"unknown body family {name!r}")

    if merged:
        raise BadParams(f"unknown parameters for family {name!r}: {sorted(merged)}")

    body = recenter_to_centroid(body)
    if min_width is not None:
        w = min_body_width(body)
        if w < float(min_width):
            raise BadParams(
                f"{name} body has width {w:.6g} below the requested minimum {min_width:.6g}"
            )
    return body


def min_body_width(K: geo.ConvexBody, extra_directions: int = 0) -> float:
    """Smallest width over facet normals plus an optional direction grid.

    In 2D the minimum width of a polygon is attained at an edge normal, so
    the normals alone are exact.  In 3D the minimum can also occur along the
    common perpendicular of an antipodal edge pair (a regular tetrahedron is
    the classic case), so callers needing a certified check should pass a
    direction grid; for axis-aligned boxes the facet normals remain exact.
    """
    dirs = K.normals
    if extra_directions > 0:
        from .sampling import grid_directions

        dirs = np.vstack([dirs, grid_directions(K.dim, extra_directions)])
    if K.dim == 3:
        decomp = _edge_pair_directions(K)
        if len(decomp):
            dirs = np.vstack([dirs, decomp])
    widths = geo.support_values(K, dirs) + geo.support_values(K, -dirs)
    return float(widths.min())


def _edge_pair_directions(K: geo.ConvexBody, cap: int = 4000) -> np.ndarray:
    """Unit cross products of edge-direction pairs (3D width candidates)."""
    edges = set()
    for cyc in K.facet_cycles:
        for i in range(len(cyc)):
            a, b = cyc[i], cyc[(i + 1) % len(cyc)]
            edges.add((min(a, b), max(a, b)))
    ev = np.array([K.vertices[b] - K.vertices[a] for a, b in sorted(edges)])
    ev = ev / np.linalg.norm(ev, axis=1)[:, None]
    if len(ev) ** 2 > cap:
        # Probing every pair on huge meshes is wasteful; dedupe directions
        # (parallel edges share all their cross products, antipodal ones
        # canonicalized first) and subsample the rest.  Small polytopes stay
        # exact; smooth approximants are direction-sampled anyway.
        canon = ev * np.sign(ev[:, :1] + 1e-300)
        ev = ev[geo._dedup_rows(canon, 2e-2)]
        limit = max(1, int(np.ceil(len(ev) / np.sqrt(cap))))
        ev = ev[::limit]
    cross = np.cross(ev[:, None, :], ev[None, :, :]).reshape(-1, 3)
    norms = np.linalg.norm(cross, axis=1)
    return cross[norms > 1e-12] / norms[norms > 1e-12][:, None]
