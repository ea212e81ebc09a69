"""Greedy nets of pairwise-disjoint shrunken regions with covering repair.

Given a convex body K and a sampleable target set Lambda inside it, build a
maximal subset X of sampled points whose shrunken regions M^{1/4c}(x) are
pairwise disjoint.  The expanded regions M^{1/c}(x) then cover Lambda, which
is re-checked on fresh samples and repaired by promoting uncovered samples to
candidates until a fresh sample is fully covered.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import geometry as geo
from . import polar
from .errors import (
    BadParams,
    EmptyCandidateSet,
    ExpansionTooSmall,
    NotInterior,
    NotNested,
    NotWellCentered,
    OriginNotInterior,
    RepairLimitExceeded,
    SeedNotContained,
)
from .geometry import ConvexBody, ray_boundary_many
from .macbeath import macbeath_body, macbeath_planes
from .reporting import PROFILE_HEADER
from .sampling import random_directions

__all__ = [
    "LambdaSampler",
    "boundary_sampler",
    "band_sampler",
    "fixed_points_sampler",
    "MNet",
    "build_mnet",
    "CertificateReport",
    "verify_mnet",
    "ProfileTable",
    "size_profile",
]


# ---------------------------------------------------------------------------
# target-set samplers


def _ray_values(K: ConvexBody, pts: np.ndarray) -> np.ndarray:
    """Vectorized ray_distance for interior points (0.0 at the origin)."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    r = np.linalg.norm(pts, axis=1)
    out = np.zeros(len(pts))
    live = r > K.tol.geom(K.scale)
    if live.any():
        hits = ray_boundary_many(K, np.zeros(K.dim), pts[live])
        t = np.linalg.norm(hits, axis=1)
        out[live] = (t - r[live]) / t
    return out


@dataclass(eq=False)
class LambdaSampler:
    """Reproducible sampler for a target subset of the interior of ``host``.

    ``sample(n, seed)`` returns n points of the target set, every one strictly
    interior to the host body; ``membership(pts)`` tests arbitrary points
    against the same set definition.
    """

    host: ConvexBody
    description: str
    _sample: Callable[[int, np.random.Generator], np.ndarray]
    _membership: Callable[[np.ndarray], np.ndarray]

    def sample(self, n: int, seed: int = 0) -> np.ndarray:
        if n < 1:
            raise BadParams("sample size must be at least 1")
        rng = np.random.default_rng(seed)
        pts = np.atleast_2d(np.asarray(self._sample(int(n), rng), dtype=float))
        worst = float(self.host.residuals(pts).max())
        if worst > -self.host.tol.geom(self.host.scale):
            raise NotInterior(
                "sampler produced a point not strictly interior to the host "
                f"(worst residual {worst:.3e})"
            )
        ok = self.membership(pts)
        if not bool(np.all(ok)):
            raise SeedNotContained(
                "sampler produced points failing its own membership test"
            )
        return pts

    def membership(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if pts.shape[1] != self.host.dim:
            raise BadParams("points do not match the host dimension")
        return np.asarray(self._membership(pts), dtype=bool)


def boundary_sampler(host: ConvexBody, target: ConvexBody) -> LambdaSampler:
    """Lambda = boundary of ``target``, a body strictly inside ``host``."""
    if target.dim != host.dim:
        raise BadParams("target and host dimension mismatch")
    worst = float(host.residuals(target.vertices).max())
    if worst > -host.tol.geom(host.scale):
        raise NotNested("target must be strictly interior to the host")
    if not target.origin_interior:
        raise BadParams("target must contain the origin in its interior")
    tol = target.tol.containment(max(target.scale, host.scale))

    def _sample(n: int, rng: np.random.Generator) -> np.ndarray:
        dirs = random_directions(rng, host.dim, n)
        return ray_boundary_many(target, np.zeros(host.dim), dirs)

    def _membership(pts: np.ndarray) -> np.ndarray:
        res = target.residuals(pts).max(axis=1)
        return np.abs(res) <= tol

    return LambdaSampler(
        host, f"boundary of a nested body ({target.n_vertices} vertices)", _sample, _membership
    )


def band_sampler(host: ConvexBody, lo: float, hi: float) -> LambdaSampler:
    """Lambda = points of ``host`` whose ray distance lies in [lo, hi]."""
    if not (0.0 < lo < hi <= 1.0):
        raise BadParams("band bounds must satisfy 0 < lo < hi <= 1")
    tol = host.tol.containment(1.0)  # ray distances are already relative

    def _sample(n: int, rng: np.random.Generator) -> np.ndarray:
        dirs = random_directions(rng, host.dim, n)
        hits = ray_boundary_many(host, np.zeros(host.dim), dirs)
        u = rng.uniform(lo, hi, n)
        return (1.0 - u)[:, None] * hits

    def _membership(pts: np.ndarray) -> np.ndarray:
        vals = _ray_values(host, pts)
        return (vals >= lo - tol) & (vals <= hi + tol)

    return LambdaSampler(host, f"ray-distance band [{lo:g}, {hi:g}]", _sample, _membership)


def fixed_points_sampler(host: ConvexBody, points) -> LambdaSampler:
    """Lambda = an explicit finite point set (sampled by cycling)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != host.dim:
        raise BadParams("points do not match the host dimension")
    if pts.shape[0] < 1:
        raise BadParams("need at least one point")
    if float(host.residuals(pts).max()) > -host.tol.geom(host.scale):
        raise NotInterior("all fixed points must be strictly interior to the host")
    tol = host.tol.containment(host.scale)

    def _sample(n: int, rng: np.random.Generator) -> np.ndarray:
        reps = -(-n // len(pts))
        return np.tile(pts, (reps, 1))[:n]

    def _membership(qs: np.ndarray) -> np.ndarray:
        d = np.linalg.norm(qs[:, None, :] - pts[None, :, :], axis=2)
        return d.min(axis=1) <= tol

    return LambdaSampler(host, f"fixed set of {len(pts)} points", _sample, _membership)


# ---------------------------------------------------------------------------
# region plane systems
#
# A region M^lam(x) in K = {Nz <= b} is exactly {z : |N(z - x)| <= lam*s}
# with s = b - Nx, because its defining planes are N z <= lam*b + (1-lam)Nx
# and -N z <= lam*b - (1+lam)Nx.  Everything the net needs -- membership,
# pairwise disjointness, bounding boxes, boundary extents -- follows from
# that system without ever building a region hull.


@dataclass(eq=False)
class _Region:
    """Shared plane-system data for all scalings of one region center."""

    center: np.ndarray  # x
    proj: np.ndarray  # N @ x
    slack: np.ndarray  # s = b - N @ x, positive for interior x
    boxes: dict = field(default_factory=dict)  # lam -> (lo, hi)
    polys: dict = field(default_factory=dict)  # lam -> (vertices, edge normals), 2D


def _make_region(K: ConvexBody, x) -> _Region:
    x = np.asarray(x, dtype=float)
    proj = K.normals @ x
    return _Region(center=x, proj=proj, slack=K.offsets - proj)


def _region_box(K: ConvexBody, reg: _Region, lam: float):
    """Valid axis-aligned bounding box of the lam-region, by plane relaxation.

    Starts from the box of (1-lam)x + lam*K intersected with its reflection
    through x, then tightens each axis with the region's own inequalities
    |n_j . z| <= lam*s_j + sum_{l != k} |n_jl| w_l (interval arithmetic), so
    the box inherits the system's locality near the boundary.
    """
    box = reg.boxes.get(lam)
    if box is not None:
        return box
    lo0, hi0 = K.bounding_box
    w = lam * np.maximum(np.minimum(hi0 - reg.center, reg.center - lo0), 0.0)
    A = np.abs(K.normals)
    ls = lam * reg.slack
    for _ in range(3):
        tot = ls + A @ w
        for k in range(K.dim):
            ak = A[:, k]
            ok = ak > 1e-12
            if ok.any():
                cand = float(((tot[ok] - ak[ok] * w[k]) / ak[ok]).min())
                if cand < w[k]:
                    w[k] = cand
    box = (reg.center - w, reg.center + w)
    reg.boxes[lam] = box
    return box


def _region_residuals(K: ConvexBody, reg: _Region, lam: float, pts: np.ndarray) -> np.ndarray:
    """Max plane residual of each point against the lam-region system."""
    D = np.atleast_2d(pts) @ K.normals.T - reg.proj
    return (np.abs(D) - lam * reg.slack).max(axis=1)


def _region_extents(K: ConvexBody, reg: _Region, lam: float, dirs: np.ndarray) -> np.ndarray:
    """Exact boundary distance of the lam-region from its center along dirs.

    Regions are symmetric about their center, so the extent along +-u is
    lam * min_j s_j / |(N u)_j|, a closed form of the plane system.
    """
    D = np.abs(np.atleast_2d(dirs) @ K.normals.T)  # (ndirs, m)
    with np.errstate(divide="ignore"):
        ratios = np.where(D > 1e-15, reg.slack / np.maximum(D, 1e-300), np.inf)
    return lam * ratios.min(axis=1)


def _region_polygon(K: ConvexBody, reg: _Region, lam: float):
    """Exact 2D region polygon and its edge normals (cached per scale).

    Starts from the region's bounding rectangle and clips it by every system
    row that actually cuts the box, so the polygon equals the region.
    """
    cached = reg.polys.get(lam)
    if cached is not None:
        return cached
    lo, hi = _region_box(K, reg, lam)
    poly = np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    ls = lam * reg.slack
    qm = K.normals @ mid
    hm = np.abs(K.normals) @ half
    normals = np.vstack([K.normals, -K.normals])
    offsets = np.concatenate([ls + reg.proj, ls - reg.proj])
    margins = np.concatenate([ls + reg.proj - qm - hm, ls - reg.proj + qm - hm])
    cutting = np.flatnonzero(margins < 0)
    order = cutting[np.argsort(margins[cutting])]
    # clip the deepest-cutting rows, then only rows the current polygon still
    # violates: a row satisfied by every polygon vertex is redundant, because
    # the polygon contains the region throughout
    head, tail = order[:10], order[10:]
    for j in head:
        poly = geo.clip_polygon(poly, normals[j], float(offsets[j]))
        if len(poly) == 0:
            break
    while len(poly) and len(tail):
        res = poly @ normals[tail].T - offsets[tail]
        live = res.max(axis=0) > 0
        tail = tail[live]
        if len(tail) == 0:
            break
        j, tail = tail[0], tail[1:]
        poly = geo.clip_polygon(poly, normals[j], float(offsets[j]))
    if len(poly):
        edges = np.roll(poly, -1, axis=0) - poly
        lens = np.linalg.norm(edges, axis=1)
        good = lens > 1e-300
        axes = np.column_stack([edges[good, 1], -edges[good, 0]]) / lens[good, None]
    else:
        axes = np.empty((0, 2))
    reg.polys[lam] = (poly, axes)
    return poly, axes


def _polygons_disjoint(pa, aa, pb, ab, eps: float) -> bool:
    """Separating-axis verdict for two convex polygons, margin >= eps."""
    if len(pa) == 0 or len(pb) == 0:
        return True
    axes = np.vstack([aa, ab])
    if len(axes) == 0:
        axes = np.array([[1.0, 0.0], [0.0, 1.0]])
    qa = pa @ axes.T
    qb = pb @ axes.T
    gap = np.maximum(qb.min(axis=0) - qa.max(axis=0), qa.min(axis=0) - qb.max(axis=0))
    return bool(gap.max() >= eps)


def _systems_intersect(K: ConvexBody, a: _Region, b: _Region, lam: float, eps: float) -> bool:
    """Conservative intersection test for two equal-scale region systems.

    In 2D the regions are materialized as exact polygons (cached) and a
    separating-axis test decides, with separation below eps counted as
    intersecting.  In 3D the test is staged: definite no when one region's
    plane pushes the other's bounding box fully outside; definite yes when
    one center sits depth >= eps inside the other region; otherwise a
    max-slack feasibility LP decides, with borderline slack (> -eps) counted
    as intersecting.  The LP keeps only rows that can bind inside the joint
    bounding box: any intersection (and its inscribed ball) lives there, so
    rows slack across the whole box never constrain the optimum, and dropping
    rows of an infeasible system only errs toward the conservative
    "intersecting" verdict.
    """
    if K.dim == 2:
        pa, aa = _region_polygon(K, a, lam)
        pb, ab = _region_polygon(K, b, lam)
        return not _polygons_disjoint(pa, aa, pb, ab, eps)
    la, lb = lam * a.slack, lam * b.slack
    boxa = _region_box(K, a, lam)
    boxb = _region_box(K, b, lam)
    axis_host = K._cache.get("axis_normals")
    if axis_host is None:
        rows = np.abs(K.normals) > 1e-12
        axis_host = bool((rows.sum(axis=1) == 1).all())
        K._cache["axis_normals"] = axis_host
    if axis_host:
        # every plane is axis-aligned, so regions equal their boxes exactly
        gap = max(
            float((boxb[0] - boxa[1]).max()), float((boxa[0] - boxb[1]).max())
        )
        return gap < eps
    Aabs = np.abs(K.normals)
    ha = Aabs @ (0.5 * (boxa[1] - boxa[0]))
    hb = Aabs @ (0.5 * (boxb[1] - boxb[0]))
    # box of B entirely beyond one of A's planes (or vice versa) -> disjoint
    if ((b.proj - hb) > (la + a.proj) + eps).any():
        return False
    if ((-b.proj - hb) > (la - a.proj) + eps).any():
        return False
    if ((a.proj - ha) > (lb + b.proj) + eps).any():
        return False
    if ((-a.proj - ha) > (lb - b.proj) + eps).any():
        return False
    dq = np.abs(b.proj - a.proj)
    if (dq - la).max() <= -eps and lb.min() >= eps:
        return True
    if (dq - lb).max() <= -eps and la.min() >= eps:
        return True

    lo = np.maximum(boxa[0], boxb[0]) - eps
    hi = np.minimum(boxa[1], boxb[1]) + eps
    if (lo > hi).any():
        return False
    mid = 0.5 * (lo + hi)
    rmax = float(np.linalg.norm(hi - lo)) * 0.5 + eps
    qm = K.normals @ mid
    hm = Aabs @ (0.5 * (hi - lo))
    N = K.normals
    normals = np.vstack([N, -N, N, -N])
    offsets = np.concatenate([la + a.proj, la - a.proj, lb + b.proj, lb - b.proj])
    # smallest slack of each row over the joint box; rows slack everywhere
    # beyond the largest possible inscribed radius can never bind
    worst = offsets - np.concatenate([qm, -qm, qm, -qm]) - np.concatenate([hm, hm, hm, hm])
    keep = worst < rmax
    if not keep.any():
        return True
    _, slack = geo._chebyshev_center(normals[keep], offsets[keep])
    return bool(slack > -eps)


# ---------------------------------------------------------------------------
# pairwise-disjointness test on built hulls (independent slower route, used
# by re-verification spot checks and the exhaustive tests)


def _regions_intersect(A: ConvexBody, B: ConvexBody, eps: float) -> bool:
    """Conservative interior-intersection test for two bounded region bodies.

    Definite yes when a vertex of one sits depth >= eps inside the other;
    definite no when one facet plane separates with margin >= eps; otherwise a
    max-slack feasibility LP on the stacked halfspace systems decides, with
    borderline slack (> -eps) counted as intersecting.
    """
    res_ab = A.residuals(B.vertices)  # (nB, mA)
    if float(res_ab.max(axis=1).min()) <= -eps:
        return True
    res_ba = B.residuals(A.vertices)
    if float(res_ba.max(axis=1).min()) <= -eps:
        return True
    if float(res_ab.min(axis=0).max()) >= eps:
        return False
    if float(res_ba.min(axis=0).max()) >= eps:
        return False
    normals = np.vstack([A.normals, B.normals])
    offsets = np.concatenate([A.offsets, B.offsets])
    _, slack = geo._chebyshev_center(normals, offsets)
    return bool(slack > -eps)


# ---------------------------------------------------------------------------
# the net


@dataclass(eq=False)
class MNet:
    """A packing-and-covering net of region centers inside ``body``."""

    body: ConvexBody
    centers: np.ndarray
    expansion: float
    sampler: LambdaSampler
    certificates: dict = field(default_factory=dict)
    repair_rounds: int = 0

    @property
    def lambda_small(self) -> float:
        return 1.0 / (4.0 * self.expansion)

    @property
    def lambda_cover(self) -> float:
        return 1.0 / self.expansion

    @property
    def size(self) -> int:
        return len(self.centers)


def _cover_mask(
    K: ConvexBody,
    pts: np.ndarray,
    regions: Sequence[_Region],
    lam: float,
    slack: float,
) -> np.ndarray:
    """Which of ``pts`` lie in the union of the lam-scaled regions.

    Region bounding boxes (padded by the slack) prefilter the points per
    region, so each point pays for plane tests only against nearby regions.
    """
    covered = np.zeros(len(pts), dtype=bool)
    boxes = [_region_box(K, reg, lam) for reg in regions]
    # big regions first: the uncovered set then collapses early and the many
    # small regions scan only stragglers
    widths = [float(np.prod(hi - lo)) for lo, hi in boxes]
    order = np.argsort(widths)[::-1]
    todo = np.arange(len(pts))
    for k in order:
        if todo.size == 0:
            break
        reg = regions[int(k)]
        lo, hi = boxes[int(k)]
        sub = pts[todo]
        inbox = np.all((sub >= lo - slack) & (sub <= hi + slack), axis=1)
        cand = todo[inbox]
        if cand.size == 0:
            continue
        hit = _region_residuals(K, reg, lam, pts[cand]) <= slack
        covered[cand[hit]] = True
        keep = np.ones(todo.size, dtype=bool)
        keep[np.flatnonzero(inbox)[hit]] = False
        todo = todo[keep]
    return covered


def _assert_buffered(K: ConvexBody, x, normals: np.ndarray, offsets: np.ndarray) -> None:
    """Check that an unshrunken region's halfspace system implies containment.

    The lam=1 region system must repeat the body's own planes verbatim as its
    first block, which makes the region a subset of the body by construction.
    """
    m = len(K.normals)
    same = np.array_equal(normals[:m], K.normals) and np.allclose(
        offsets[:m], K.offsets, rtol=0.0, atol=K.tol.geom(K.scale)
    )
    if not same:
        raise NotNested(
            "full region at a net center is not cut from the body's own planes"
        )


def _greedy_pack(
    K: ConvexBody,
    pool: np.ndarray,
    lam_small: float,
    region_cache: dict,
    rays: np.ndarray,
) -> tuple[list[int], list[_Region], int]:
    """Greedy maximal pairwise-disjoint subset of the candidate pool.

    Candidates are visited in ray-distance ascending order (ties by pool
    index); each is accepted unless its shrunken region intersects a
    previously accepted one (bounding boxes prefilter, the plane-system LP
    decides).  Returns accepted pool indices (visit order), their regions,
    and the rejected count.
    """
    eps = K.tol.geom(K.scale)
    order = np.lexsort((np.arange(len(pool)), rays))

    n, d = pool.shape
    accepted: list[int] = []
    regions: list[_Region] = []
    los = np.empty((n, d))
    his = np.empty((n, d))
    na = 0
    rejected = 0
    for idx in order:
        idx = int(idx)
        reg = region_cache.get(idx)
        if reg is None:
            reg = _make_region(K, pool[idx])
            region_cache[idx] = reg
        lo, hi = _region_box(K, reg, lam_small)
        if na:
            mask = np.all(lo <= his[:na], axis=1) & np.all(los[:na] <= hi, axis=1)
            hits = np.flatnonzero(mask)
        else:
            hits = np.empty(0, dtype=int)
        if any(_systems_intersect(K, reg, regions[j], lam_small, eps) for j in hits):
            rejected += 1
            continue
        accepted.append(idx)
        regions.append(reg)
        los[na] = lo
        his[na] = hi
        na += 1
    return accepted, regions, rejected


def build_mnet(
    K: ConvexBody,
    sampler: LambdaSampler,
    c: float = 5.0,
    n_candidates: int = 1000,
    seed: int = 0,
    fresh_samples: Optional[int] = None,
    max_repair_rounds: int = 64,
) -> MNet:
    """Greedy maximal net of disjoint shrunken regions, repaired to cover.

    Shrunken regions M^{1/4c}(x) of accepted centers are pairwise disjoint;
    after the repair loop, a fresh independent sample of the target set is
    entirely covered by the expanded regions M^{1/c}(x).  Uncovered fresh
    samples are themselves promoted to candidates and the greedy pass re-runs,
    which terminates because a point whose shrunken region misses every
    accepted region is always accepted.
    """
    if sampler.host is not K:
        raise BadParams("sampler host must be the same body the net is built in")
    if not K.origin_interior:
        raise OriginNotInterior("net construction needs the origin inside the body")
    if c < 5.0:
        raise ExpansionTooSmall(f"expansion must be at least 5, got {c:g}")
    if n_candidates < 1:
        raise EmptyCandidateSet("need at least one candidate sample")
    if fresh_samples is None:
        fresh_samples = max(int(n_candidates), 256)

    lam_small = 1.0 / (4.0 * c)
    lam_cover = 1.0 / c
    cover_slack = K.tol.containment(K.scale)
    pool = sampler.sample(n_candidates, seed)
    rays = _ray_values(K, pool)
    region_cache: dict[int, _Region] = {}

    pre_repair_rate = None
    rounds = 0
    scout_n = int(fresh_samples)
    while True:
        accepted, regions, rejected = _greedy_pack(K, pool, lam_small, region_cache, rays)
        centers = pool[accepted]
        fresh = sampler.sample(fresh_samples, seed + 7919 * (rounds + 1))
        covered = _cover_mask(K, fresh, regions, lam_cover, cover_slack)
        rate = float(covered.mean())
        if pre_repair_rate is None:
            pre_repair_rate = rate
        if covered.all():
            break
        rounds += 1
        if rounds > max_repair_rounds:
            raise RepairLimitExceeded(
                f"covering repair did not converge in {max_repair_rounds} rounds "
                f"(rate {rate:.4f})"
            )
        # promote every uncovered fresh point, plus the misses of a growing
        # scout sample: pocket harvesting scales with the remaining deficit
        # while the certifying sample above stays at its contract size
        scout = sampler.sample(scout_n, seed + 104729 * rounds)
        sc_covered = _cover_mask(K, scout, regions, lam_cover, cover_slack)
        misses = np.vstack([fresh[~covered], scout[~sc_covered]])
        pool = np.vstack([pool, misses])
        rays = np.concatenate([rays, _ray_values(K, misses)])
        scout_n = min(2 * scout_n, 40000)

    # buffering: each unshrunken region's halfspace system starts with the
    # body's own planes, which forces the region inside the body
    for x in centers:
        normals, offsets = macbeath_planes(K, x, 1.0)
        _assert_buffered(K, x, normals, offsets)

    certificates = {
        "packing": True,
        "covering": True,
        "buffering": True,
        "maximality": True,
        "rejectedCandidates": int(rejected),
        "coveringRatePreRepair": float(pre_repair_rate),
        "coveringRate": 1.0,
        "freshSamples": int(fresh_samples),
        "scoutSamples": int(scout_n),
    }
    return MNet(
        body=K,
        centers=centers,
        expansion=float(c),
        sampler=sampler,
        certificates=certificates,
        repair_rounds=rounds,
    )


# ---------------------------------------------------------------------------
# independent re-verification


@dataclass(frozen=True)
class CertificateReport:
    """Fresh re-check of packing, covering, and buffering for a net."""

    packing_ok: bool
    covering_ok: bool
    buffering_ok: bool
    packing_pairs: tuple
    covering_misses: np.ndarray
    buffering_bad: tuple
    coverage_rate: float
    fresh_samples: int

    @property
    def ok(self) -> bool:
        return self.packing_ok and self.covering_ok and self.buffering_ok


def verify_mnet(net: MNet, fresh_samples: int = 2000, seed: int = 1) -> CertificateReport:
    """Recompute all three net certificates from scratch.

    Builds every region anew from ``net.body`` and ``net.centers`` (so edits
    to the center list are caught), tests all center pairs for shrunken-region
    disjointness, tests a fresh target sample for expanded-region covering,
    and re-checks that unshrunken regions stay inside the body (plane-system
    containment for every center, plus vertex residuals on a spot-check of
    fully built regions).
    """
    K = net.body
    eps = K.tol.geom(K.scale)
    slack = K.tol.containment(K.scale)
    centers = np.atleast_2d(np.asarray(net.centers, dtype=float))
    n = len(centers)

    # a center pushed to (or past) the boundary breaks every region claim
    interior = K.residuals(centers).max(axis=1) < -K.tol.geom(K.scale)
    bad = [int(i) for i in np.flatnonzero(~interior)]
    good = np.flatnonzero(interior)

    regions = {int(i): _make_region(K, centers[i]) for i in good}
    boxes = [_region_box(K, regions[int(i)], net.lambda_small) for i in good]
    los = np.array([b[0] for b in boxes]) if boxes else np.empty((0, K.dim))
    his = np.array([b[1] for b in boxes]) if boxes else np.empty((0, K.dim))
    pairs = []
    for a in range(len(good)):
        rest = slice(a + 1, None)
        mask = np.all(los[a] <= his[rest], axis=1) & np.all(los[rest] <= his[a], axis=1)
        for b in np.flatnonzero(mask) + a + 1:
            i, j = int(good[a]), int(good[b])
            if _systems_intersect(K, regions[i], regions[j], net.lambda_small, eps):
                pairs.append((i, j))

    fresh = net.sampler.sample(fresh_samples, seed)
    covered = _cover_mask(
        K, fresh, [regions[int(i)] for i in good], net.lambda_cover, slack
    )
    misses = fresh[~covered]

    for i in good:
        normals, offsets = macbeath_planes(K, centers[i], 1.0)
        try:
            _assert_buffered(K, centers[i], normals, offsets)
        except NotNested:
            bad.append(int(i))
    # independent numeric route: fully built hulls on a spot-check subset,
    # shrunken-region disjointness included
    spot = [int(i) for i in good[:: max(1, len(good) // 32)]]
    hulls = {i: macbeath_body(K, centers[i], net.lambda_small) for i in spot}
    for a, i in enumerate(spot):
        full = macbeath_body(K, centers[i], 1.0)
        if float(K.residuals(full.vertices).max()) > slack:
            bad.append(int(i))
        for j in spot[a + 1 :]:
            if _regions_intersect(hulls[i], hulls[j], eps) and (i, j) not in pairs:
                pairs.append((i, j))

    return CertificateReport(
        packing_ok=len(pairs) == 0,
        covering_ok=len(misses) == 0,
        buffering_ok=len(bad) == 0,
        packing_pairs=tuple(pairs),
        covering_misses=misses,
        buffering_bad=tuple(sorted(set(bad))),
        coverage_rate=float(covered.mean()),
        fresh_samples=int(fresh_samples),
    )


# ---------------------------------------------------------------------------
# size scaling across band widths


@dataclass(frozen=True)
class ProfileTable:
    """Net sizes over a sweep of band widths, with the log-log growth slope."""

    body_label: str
    dim: int
    rows: tuple  # (epsilon, band_size, net_size, seconds)

    @property
    def slope(self) -> float:
        eps = np.array([r[0] for r in self.rows])
        sizes = np.array([r[2] for r in self.rows], dtype=float)
        if len(eps) < 2 or (sizes <= 0).any():
            return float("nan")
        coef = np.polyfit(np.log(1.0 / eps), np.log(sizes), 1)
        return float(coef[0])

    def csv_rows(self) -> list[dict]:
        out = []
        for eps, band, size, secs in self.rows:
            row = {
                "eps": f"{eps:.12g}",
                "bandSize": band,
                "netSize": size,
                "seconds": f"{secs:.3f}",
            }
            assert list(row) == PROFILE_HEADER
            out.append(row)
        return out


def size_profile(
    K: ConvexBody,
    eps_list: Sequence[float],
    c: float = 5.0,
    seed: int = 0,
    n_candidates: Optional[int] = None,
    body_label: str = "body",
) -> ProfileTable:
    """Net sizes for the ray-distance bands [eps, 2*eps] over a sweep of eps.

    Warns (does not fail) when the body is not well-centered, since the size
    scaling is only meaningful for well-centered bodies.
    """
    eps_arr = [float(e) for e in eps_list]
    if not eps_arr:
        raise BadParams("need at least one epsilon")
    if any(not (0.0 < e <= 0.5) for e in eps_arr):
        raise BadParams("band widths must lie in (0, 1/2]")
    report = polar.centering_report(K)
    if not report.well_centered:
        warnings.warn(
            NotWellCentered(
                f"mahler volume {report.mahler:.4g} exceeds the threshold "
                f"{report.mu_max:.4g}; size scaling may be distorted"
            )
        )

    rows = []
    for i, eps in enumerate(sorted(eps_arr, reverse=True)):
        if n_candidates is None:
            ncand = int(min(4000, max(400, 120.0 * (1.0 / eps) ** ((K.dim - 1) / 2.0))))
        else:
            ncand = int(n_candidates)
        t0 = time.perf_counter()
        sampler = band_sampler(K, eps, 2.0 * eps)
        net = build_mnet(K, sampler, c=c, n_candidates=ncand, seed=seed + i)
        secs = time.perf_counter() - t0
        rows.append((eps, ncand, net.size, secs))
    return ProfileTable(body_label=body_label, dim=K.dim, rows=tuple(rows))
