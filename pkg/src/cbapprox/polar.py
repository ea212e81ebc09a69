"""Polar duality about the origin, Mahler volume, and the centering policy.

The polar of a body with the origin strictly interior is again a bounded
body; vertices exchange with facets. A body counts as well centered when its
Mahler volume stays within 1.25x of the ball's, measured at the centroid.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .errors import AtOrigin, OriginNotInterior


def ball_volume_constant(dim: int) -> float:
    """omega_d: volume of the unit ball."""
    return math.pi if dim == 2 else 4.0 * math.pi / 3.0


def mahler_ball(dim: int) -> float:
    return ball_volume_constant(dim) ** 2


MU_MAX_FACTOR = 1.25


def polar_point(v, tol: geo.Tolerance = geo.DEFAULT_TOL) -> geo.Hyperplane:
    """Hyperplane dual to a point: normal v/|v|, offset 1/|v|."""
    v = np.asarray(v, dtype=float)
    n = float(np.linalg.norm(v))
    if n <= tol.eps_geom:
        raise AtOrigin("polar of the origin is undefined")
    return geo.Hyperplane(v / n, 1.0 / n)


def polar_hyperplane(h: geo.Hyperplane, tol: geo.Tolerance = geo.DEFAULT_TOL) -> np.ndarray:
    """Point dual to a hyperplane not through the origin: normal/offset."""
    if abs(h.offset) <= tol.eps_geom:
        raise AtOrigin("polar of a hyperplane through the origin is undefined")
    return h.normal / h.offset


def polar_body(K: geo.ConvexBody) -> geo.ConvexBody:
    """Polar dual body, built combinatorially from vertex constraints."""
    if not K.origin_interior:
        raise OriginNotInterior("polar duality needs the origin strictly inside")
    lens = np.linalg.norm(K.vertices, axis=1)
    normals = K.vertices / lens[:, None]
    offsets = 1.0 / lens
    return geo.halfspace_intersection_trusted(normals, offsets, np.zeros(K.dim), K.tol)


def mahler_volume(K: geo.ConvexBody) -> float:
    return geo.volume(K) * geo.volume(polar_body(K))


@dataclass(frozen=True)
class CenteringReport:
    mahler: float
    mu_max: float
    centroid_offset: float
    well_centered: bool


def centering_report(K: geo.ConvexBody) -> CenteringReport:
    """Mahler volume against the 1.25x-ball threshold, plus centroid offset."""
    mu = mahler_volume(K)
    mu_max = MU_MAX_FACTOR * mahler_ball(K.dim)
    off = float(np.linalg.norm(geo.centroid(K)))
    return CenteringReport(mu, mu_max, off, mu <= mu_max)


def recenter_to_centroid(K: geo.ConvexBody) -> geo.ConvexBody:
    return K.translated(-geo.centroid(K))
