"""Arithmetic- and harmonic-mean bodies between nested convex pairs.

For a pair K0 inside K1 with the origin interior to K0, the arithmetic mean
is K_A = (K0 + K1)/2 under Minkowski addition, and the harmonic-mean body
K_H has, along every ray from the origin, the harmonic mean of the two
boundary radii.  Polarity exchanges the two means exactly -- the polar of
the arithmetic mean of the polars is the harmonic-mean body -- which yields
an exact polytope construction route next to the sampled radial one.

The audits in this module quantify how much room the inner body keeps
inside the harmonic mean locally:

* ``fatness_audit``: Macbeath regions of the intermediate body centered on
  the boundary of K0 retain a definite fraction of their volume inside K0.
* ``hm_fat_aux_audit``: chords through points lying deep enough below the
  boundary of K0 (measured by a cross-ratio threshold) keep at least a
  lam/6 fraction of their length inside K0.
* ``shadow_containment_audit``: a shrunken translated Macbeath region
  M' = b + gamma*R fits inside M and K0 simultaneously while its radial
  shadow stays inside M.
"""

from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .errors import (
    BadParams,
    CertificateError,
    DegenerateInput,
    NotInterior,
    NotNested,
    OriginNotInterior,
)
from .geometry import ConvexBody
from .macbeath import cross_ratio, macbeath_body, macbeath_planes
from .polar import polar_body
from .reporting import AuditReport
from .sampling import grid_directions, random_directions

__all__ = [
    "NestedPair",
    "MeanBody",
    "FatnessReport",
    "minkowski_sum",
    "arithmetic_mean_body",
    "harmonic_mean_radial",
    "harmonic_mean_body",
    "harmonic_bundle_deviation",
    "fatness_audit",
    "hm_fat_aux_audit",
    "shadow_containment_audit",
]


# -- nested pairs ------------------------------------------------------------


@dataclass(eq=False)
class NestedPair:
    """A pair of convex bodies with ``inner`` contained in ``outer`` and the
    origin strictly interior to ``inner``.

    Nesting is strict by default (every inner vertex strictly inside the
    outer body); ``allow_touching=True`` admits pairs whose boundaries meet,
    including the degenerate equal pair.
    """

    inner: ConvexBody
    outer: ConvexBody
    allow_touching: bool = False
    origin_interior: bool = field(init=False, default=False)

    def __post_init__(self):
        if self.inner.dim != self.outer.dim:
            raise BadParams("inner and outer bodies must share a dimension")
        if not self.inner.origin_interior:
            raise OriginNotInterior("origin must be strictly interior to the inner body")
        worst = float(self.outer.residuals(self.inner.vertices).max())
        if self.allow_touching:
            limit = self.outer.tol.containment(self.span)
        else:
            limit = -self.outer.tol.geom(self.span)
        if worst > limit:
            raise NotNested(
                f"inner vertex escapes the outer body by {worst:.3e} "
                f"(limit {limit:.3e})"
            )
        self.origin_interior = True

    @property
    def dim(self) -> int:
        return self.inner.dim

    @property
    def span(self) -> float:
        return self.outer.diameter


@dataclass(eq=False)
class MeanBody:
    """An intermediate body certified to lie between a nested pair."""

    kind: str  # "arithmetic" | "harmonic"
    body: ConvexBody
    pair: NestedPair
    construction_route: str


def _certify_between(pair: NestedPair, mid: ConvexBody, slack_in: float, slack_out: float):
    """Vertex containment certificates inner <= mid <= outer."""
    r_in = float(mid.residuals(pair.inner.vertices).max())
    if r_in > slack_in:
        raise NotNested(f"inner body escapes the mean body by {r_in:.3e}")
    r_out = float(pair.outer.residuals(mid.vertices).max())
    if r_out > slack_out:
        raise NotNested(f"mean body escapes the outer body by {r_out:.3e}")
    return r_in, r_out


# -- Minkowski sums and the arithmetic mean ----------------------------------


def _vertex_array(X) -> np.ndarray:
    if isinstance(X, ConvexBody):
        return X.vertices
    pts = np.atleast_2d(np.asarray(X, dtype=float))
    if pts.ndim != 2:
        raise BadParams("summand must be a body or a point array")
    return pts


def minkowski_sum(A, B) -> ConvexBody:
    """Minkowski sum of two polytopes as the hull of pairwise vertex sums.

    Either argument may be a raw point array (a degenerate summand such as a
    single translate point); the result must still be full-dimensional.
    When both summands are bodies, support-function additivity is
    spot-checked on a deterministic direction grid.
    """
    va, vb = _vertex_array(A), _vertex_array(B)
    if va.shape[1] != vb.shape[1]:
        raise BadParams("summands must share a dimension")
    tol = A.tol if isinstance(A, ConvexBody) else (
        B.tol if isinstance(B, ConvexBody) else geo.DEFAULT_TOL
    )
    pts = (va[:, None, :] + vb[None, :, :]).reshape(-1, va.shape[1])
    out = geo.convex_hull(pts, tol)
    if isinstance(A, ConvexBody) and isinstance(B, ConvexBody):
        dirs = grid_directions(out.dim, 100)
        gap = np.abs(
            geo.support_values(out, dirs)
            - geo.support_values(A, dirs)
            - geo.support_values(B, dirs)
        ).max()
        scale = max(A.diameter, B.diameter, 1.0)
        if gap > tol.containment(scale):
            raise CertificateError(
                f"support additivity off by {float(gap):.3e} after Minkowski sum"
            )
    return out


def arithmetic_mean_body(pair: NestedPair) -> MeanBody:
    """Half the Minkowski sum of the pair, certified to lie between them."""
    body = minkowski_sum(pair.inner, pair.outer).scaled(0.5)
    slack = body.tol.containment(pair.span)
    _certify_between(pair, body, slack, slack)
    return MeanBody("arithmetic", body, pair, "minkowski-hull")


# -- the harmonic mean -------------------------------------------------------


def harmonic_mean_radial(pair: NestedPair, direction) -> np.ndarray:
    """Boundary point of the harmonic-mean body along one ray from the origin.

    The returned radius is the harmonic mean of the two boundary radii, so
    the quadruple (origin, point; outer hit, inner hit) is harmonic.
    """
    u = geo.unit(np.asarray(direction, dtype=float))
    origin = np.zeros(pair.dim)
    rb = float(np.linalg.norm(geo.ray_boundary(pair.inner, origin, u)))
    rd = float(np.linalg.norm(geo.ray_boundary(pair.outer, origin, u)))
    return (2.0 * rb * rd / (rb + rd)) * u


def harmonic_bundle_deviation(pair: NestedPair, mid: ConvexBody, directions) -> float:
    """Worst |cross ratio + 1| of (O, c; d, b) over boundary hits along the
    given directions, where b, c, d are the inner/mid/outer boundary points.

    Directions along which the pair touches (b == d) are skipped: the
    quadruple degenerates exactly where the identity holds trivially.
    """
    origin = np.zeros(pair.dim)
    dirs = np.atleast_2d(np.asarray(directions, dtype=float))
    b = geo.ray_boundary_many(pair.inner, origin, dirs)
    c = geo.ray_boundary_many(mid, origin, dirs)
    d = geo.ray_boundary_many(pair.outer, origin, dirs)
    span = pair.span
    worst = 0.0
    for i in range(len(dirs)):
        if np.linalg.norm(d[i] - b[i]) <= 1e-12 * span:
            continue  # touching ray: harmonic quadruple degenerates
        worst = max(worst, abs(cross_ratio(origin, c[i], d[i], b[i]) + 1.0))
    return worst


def harmonic_mean_body(
    pair: NestedPair,
    route: str = "polar-of-arithmetic",
    resolution: int | None = None,
) -> MeanBody:
    """Harmonic-mean body of a nested pair.

    Routes:

    * ``polar-of-arithmetic`` (default, exact): polar of the arithmetic mean
      of the polar pair.  Support functions add under Minkowski sums and
      polar radii are reciprocal support values, so the radial harmonic-mean
      identity holds exactly for the resulting polytope.
    * ``direct-radial``: hull of boundary samples along ``resolution``
      directions (an inner approximation, used for cross-validation).

    Both routes are certified inner <= K_H <= outer; the harmonic-bundle
    identity is checked on construction samples to 1e-9.
    """
    if route == "polar-of-arithmetic":
        polar_pair = NestedPair(
            polar_body(pair.outer), polar_body(pair.inner), allow_touching=True
        )
        body = polar_body(arithmetic_mean_body(polar_pair).body)
        slack_in = body.tol.containment(pair.span)
        bundle_dirs = grid_directions(pair.dim, 64)
    elif route == "direct-radial":
        res = resolution if resolution is not None else (1024 if pair.dim == 2 else 4096)
        if res < 8:
            raise BadParams("direct-radial resolution must be at least 8")
        dirs = grid_directions(pair.dim, res)
        origin = np.zeros(pair.dim)
        rb = np.linalg.norm(geo.ray_boundary_many(pair.inner, origin, dirs), axis=1)
        rd = np.linalg.norm(geo.ray_boundary_many(pair.outer, origin, dirs), axis=1)
        radii = 2.0 * rb * rd / (rb + rd)
        body = geo.convex_hull(dirs * radii[:, None], pair.inner.tol)
        # A sampled hull may undercut the true body between directions, so
        # the inner certificate carries the sampling-defect allowance.
        slack_in = body.tol.containment(pair.span) + 2.0 * pair.span / res
        bundle_dirs = dirs[: min(64, len(dirs))]
    else:
        raise BadParams(f"unknown harmonic route {route!r}")
    _certify_between(pair, body, slack_in, body.tol.containment(pair.span))
    dev = harmonic_bundle_deviation(pair, body, bundle_dirs)
    if dev > 1e-9:
        raise CertificateError(
            f"harmonic-bundle identity off by {dev:.3e} on construction samples"
        )
    return MeanBody("harmonic", body, pair, route)


# -- relative-fatness audit ---------------------------------------------------


@dataclass
class FatnessReport:
    """Worst observed vol(M ∩ K0)/vol(M) over boundary-centered regions."""

    samples: int
    min_ratio: float
    per_scale: dict
    per_scale_max: dict = field(default_factory=dict)
    per_scale_nonpositive: dict = field(default_factory=dict)
    skipped: int = 0

    def to_audit_report(self) -> AuditReport:
        rep = AuditReport()
        for lam, lo in self.per_scale.items():
            rep.add(
                f"fatness({lam:g})",
                self.samples,
                self.per_scale_nonpositive.get(lam, 0),
                lo,
                self.per_scale_max.get(lam, lo),
            )
        return rep


def _intersection_volume(M: ConvexBody, K: ConvexBody) -> float:
    """Volume of the intersection of two bodies (0.0 when empty or flat)."""
    if M.dim == 2:
        poly = M.vertices
        for n_i, b_i in zip(K.normals, K.offsets):
            if (poly @ n_i - b_i <= 0.0).all():
                continue
            poly = geo.clip_polygon(poly, n_i, b_i)
            if len(poly) < 3:
                return 0.0
        return 0.5 * abs(geo._shoelace2(poly))
    normals = np.vstack([M.normals, K.normals])
    offsets = np.concatenate([M.offsets, K.offsets])
    try:
        return geo.volume(geo.halfspace_intersection((normals, offsets), None, M.tol))
    except (geo.Infeasible, DegenerateInput):
        return 0.0
    except geo.QhullError:
        return 0.0


def fatness_audit(
    pair: NestedPair,
    intermediate,
    n_boundary_pts: int = 200,
    scales=(0.125, 0.25, 0.5, 1.0),
    seed: int = 0,
) -> FatnessReport:
    """Sample points on the boundary of the inner body and measure what
    fraction of each Macbeath region of the intermediate body (at each scale)
    lies inside the inner body.

    ``intermediate`` may be a MeanBody or any ConvexBody between the pair.
    Boundary points at which the intermediate's region degenerates (the
    point sits on the intermediate's own boundary, as in the equal-pair
    case) contribute the limit ratio 1.0; points whose region collapses
    numerically are skipped and counted.
    """
    body = intermediate.body if isinstance(intermediate, MeanBody) else intermediate
    rng = np.random.default_rng(seed)
    origin = np.zeros(pair.dim)
    dirs = random_directions(rng, pair.dim, n_boundary_pts)
    pts = geo.ray_boundary_many(pair.inner, origin, dirs)
    inner_res = body.residuals(pts).max(axis=1)
    touch = inner_res >= -body.tol.geom(body.scale)

    per_scale, per_scale_max, per_nonpos = {}, {}, {}
    skipped = 0
    for lam in scales:
        lam = float(lam)
        if not 0.0 < lam <= 1.0:
            raise BadParams("fatness scales must lie in (0, 1]")
        lo, hi, nonpos = np.inf, -np.inf, 0
        for i in range(len(pts)):
            if touch[i]:
                ratio = 1.0
            else:
                try:
                    M = macbeath_body(body, pts[i], lam)
                except (NotInterior, DegenerateInput):
                    skipped += 1
                    continue
                vol_m = geo.volume(M)
                if vol_m <= 0.0:
                    skipped += 1
                    continue
                ratio = min(1.0, max(0.0, _intersection_volume(M, pair.inner) / vol_m))
            lo, hi = min(lo, ratio), max(hi, ratio)
            if ratio <= 0.0:
                nonpos += 1
        per_scale[lam] = float(lo)
        per_scale_max[lam] = float(hi)
        per_nonpos[lam] = nonpos
    return FatnessReport(
        samples=n_boundary_pts,
        min_ratio=float(min(per_scale.values())),
        per_scale=per_scale,
        per_scale_max=per_scale_max,
        per_scale_nonpositive=per_nonpos,
        skipped=skipped,
    )


# -- chord-fraction audit ------------------------------------------------------


def hm_fat_aux_audit(
    pair: NestedPair,
    n_configs: int = 2000,
    lambda_grid=(0.1, 0.3, 0.5),
    seed: int = 0,
    hm: MeanBody | None = None,
) -> AuditReport:
    """Audit the chord-fraction inequality of the harmonic-mean body.

    A ray from the origin meets the inner boundary at c and the outer
    boundary at d.  A point b on the ray deep enough that the cross ratio
    (O, c; d, b) is at most -lam, and any line through b meeting the
    harmonic-mean boundary at c' and c'', must keep at least a lam/6
    fraction of the shorter chord arm inside the inner body (up to a
    1e-9 * span slack).

    Configurations where every supporting facet of the outer body at d is
    parallel to the chord line within 1e-8 are skipped: the inequality is
    established only up to perturbations of that supporting line.
    """
    if not lambda_grid:
        raise BadParams("lambda_grid must be nonempty")
    for lam in lambda_grid:
        if not 0.0 < lam < 1.0:
            raise BadParams("chord-fraction lambda values must lie in (0, 1)")
    body = (hm if hm is not None else harmonic_mean_body(pair)).body
    k0, k1 = pair.inner, pair.outer
    rng = np.random.default_rng(seed)
    origin = np.zeros(pair.dim)
    span = pair.span
    slack = 1e-9 * span

    accepted = violations = 0
    lo, hi = np.inf, -np.inf
    attempts = 0
    max_attempts = 30 * n_configs + 100
    while accepted < n_configs and attempts < max_attempts:
        attempts += 1
        u = random_directions(rng, pair.dim, 1)[0]
        c = geo.ray_boundary(k0, origin, u)
        d = geo.ray_boundary(k1, origin, u)
        tc, td = float(c @ u), float(d @ u)
        lam = float(lambda_grid[accepted % len(lambda_grid)])
        # Deepest admissible point: (O,c;d,b) == -lam at tb_star; any
        # smaller tb drives the cross ratio further below -lam.
        tb_star = tc * td / (td + lam * (td - tc))
        tb = tb_star * rng.uniform(0.05, 0.995)
        b = tb * u
        w = random_directions(rng, pair.dim, 1)[0]
        support_res = k1.residuals(d[None, :])[0]
        touching = support_res >= -k1.tol.containment(k1.scale)
        if touching.any() and np.abs(k1.normals[touching] @ w).max() <= 1e-8:
            continue  # supporting plane at d parallel to the chord line
        c1 = geo.ray_boundary(body, b, w)
        c2 = geo.ray_boundary(body, b, -w)
        e1 = geo.ray_boundary(k0, b, w)
        e2 = geo.ray_boundary(k0, b, -w)
        len1, len2 = float(np.linalg.norm(c1 - b)), float(np.linalg.norm(c2 - b))
        in1 = min(float(np.linalg.norm(e1 - b)), len1)
        in2 = min(float(np.linalg.norm(e2 - b)), len2)
        lhs = min(in1, in2)
        rhs = (lam / 6.0) * min(len1, len2)
        const = lhs / rhs if rhs > 0 else np.inf
        lo, hi = min(lo, const), max(hi, const)
        if lhs < rhs - slack:
            violations += 1
        accepted += 1
    rep = AuditReport()
    rep.add("chord-inside-fraction", accepted, violations, lo, hi)
    return rep


# -- shadow-containment audit ---------------------------------------------------


_SHADOW_ROWS = (
    "shadow-volume-floor",
    "shadow-core-containment",
    "shadow-cone-containment",
)


def _shadow_pass(pair, beta, n_pts, seed, kappa, body, suffix) -> AuditReport:
    k0 = pair.inner
    rng = np.random.default_rng(seed)
    origin = np.zeros(pair.dim)
    span = pair.span
    slack = body.tol.containment(span)
    d = pair.dim
    lam = beta / kappa
    gamma = beta / (120.0 * kappa)
    vol_target = (1.0 / (120.0 * kappa)) ** d

    ray_n = ray_v = 0
    ray_lo, ray_hi = np.inf, -np.inf
    vol_n = vol_v = 0
    vol_lo, vol_hi = np.inf, -np.inf
    core_n = core_v = 0
    core_lo, core_hi = np.inf, -np.inf
    cone_n = cone_v = 0
    cone_lo, cone_hi = np.inf, -np.inf

    for _ in range(n_pts):
        u = random_directions(rng, pair.dim, 1)[0]
        c = geo.ray_boundary(k0, origin, u)
        h = geo.ray_boundary(body, origin, u)
        tc, th = float(c @ u), float(h @ u)
        ch = th - tc
        # The mid-body exit beyond c is no farther than c is from the origin.
        ray_n += 1
        ray_lo, ray_hi = min(ray_lo, ch / tc), max(ray_hi, ch / tc)
        if ch - tc > 1e-9 * span:
            ray_v += 1
        if ch <= body.tol.geom(body.scale):
            continue  # boundaries touch along this ray; the region degenerates
        try:
            r_body = macbeath_body(body, c, 1.0)
        except (NotInterior, DegenerateInput):
            continue
        r_verts = r_body.vertices - c
        vol_r = geo.volume(r_body)
        b = c - (lam * ch) * u
        m_normals, m_offsets = macbeath_planes(body, c, beta)
        mp_verts = b + gamma * r_verts

        vol_m = beta**d * vol_r
        try:
            vol_mp = geo.volume(geo.convex_hull(mp_verts, body.tol))
        except DegenerateInput:
            continue
        ratio = vol_mp / vol_m
        const = ratio / vol_target
        vol_n += 1
        vol_lo, vol_hi = min(vol_lo, const), max(vol_hi, const)
        if ratio < vol_target * 0.99:
            vol_v += 1

        worst = max(
            float((mp_verts @ m_normals.T - m_offsets).max()),
            float(k0.residuals(mp_verts).max()),
        )
        core_n += 1
        core_lo, core_hi = min(core_lo, worst / span), max(core_hi, worst / span)
        if worst > slack:
            core_v += 1

        weights = rng.dirichlet(np.ones(len(mp_verts)), size=3)
        for z in weights @ mp_verts:
            exit_pt = geo.ray_boundary(k0, origin, z)
            for s in (1.0, float(rng.uniform(0.0, 1.0))):
                x = z + s * (exit_pt - z)
                res = float((x @ m_normals.T - m_offsets).max())
                cone_n += 1
                cone_lo = min(cone_lo, res / span)
                cone_hi = max(cone_hi, res / span)
                if res > slack:
                    cone_v += 1

    rep = AuditReport()
    rep.add("ray-exit-halfway" + suffix, ray_n, ray_v, ray_lo, ray_hi)
    rep.add("shadow-volume-floor" + suffix, vol_n, vol_v, vol_lo, vol_hi)
    rep.add("shadow-core-containment" + suffix, core_n, core_v, core_lo, core_hi)
    rep.add("shadow-cone-containment" + suffix, cone_n, cone_v, cone_lo, cone_hi)
    return rep


def shadow_containment_audit(
    pair: NestedPair,
    beta: float = 0.5,
    n_pts: int = 300,
    seed: int = 0,
    kappa: float = 2.0,
    hm: MeanBody | None = None,
) -> AuditReport:
    """Reconstruct the translated region M' = b + gamma*R at sampled boundary
    points of the inner body and audit its three containment claims.

    For each boundary point c of the inner body, R is the full Macbeath
    region of the harmonic-mean body at c recentered to the origin,
    M = c + beta*R, b sits on segment Oc at the boundary of c + lam*R
    (lam = beta/kappa), and M' = b + gamma*R with gamma = beta/(120*kappa).
    Audited claims: the volume ratio vol(M')/vol(M) stays above
    (1/(120*kappa))^d less 1%; M' lies inside both M and the inner body;
    sampled points of the radial shadow of M' (out to the inner boundary)
    stay inside M.  Also audited: the mid-body exit h beyond c satisfies
    |hc| <= |Oc| on every ray.

    With the default kappa = 2, any violation of the three region claims
    triggers one retry pass at kappa = 4 whose rows are appended with a
    ``-retry-k4`` suffix (reported alongside, never replacing, the
    kappa = 2 rows).
    """
    if not 0.0 < beta <= 1.0:
        raise BadParams("beta must lie in (0, 1]")
    if kappa < 2.0:
        raise BadParams("kappa must be at least 2")
    body = (hm if hm is not None else harmonic_mean_body(pair)).body
    rep = _shadow_pass(pair, beta, n_pts, seed, kappa, body, "")
    core = sum(rep.row(name).violations for name in _SHADOW_ROWS)
    if kappa == 2.0 and core > 0:
        rep.extend(_shadow_pass(pair, beta, n_pts, seed, 4.0, body, "-retry-k4"))
    return rep
