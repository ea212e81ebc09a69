"""Direction grids and point samplers shared by the audit and search routines."""

import numpy as np

from .errors import BadParams
from .geometry import ConvexBody, ray_boundary_many


def circle_directions(n: int) -> np.ndarray:
    theta = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    return np.stack([np.cos(theta), np.sin(theta)], axis=1)


def fibonacci_sphere(n: int) -> np.ndarray:
    """Near-uniform unit vectors on S^2 from the golden-ratio lattice."""
    i = np.arange(n, dtype=float)
    phi = np.pi * (3.0 - np.sqrt(5.0)) * i
    z = 1.0 - (2.0 * i + 1.0) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def grid_directions(dim: int, n: int) -> np.ndarray:
    """Deterministic, roughly equal-angle unit direction grid."""
    if dim == 2:
        return circle_directions(n)
    if dim == 3:
        return fibonacci_sphere(n)
    raise BadParams(f"unsupported dimension {dim}")


def random_directions(rng: np.random.Generator, dim: int, n: int) -> np.ndarray:
    v = rng.standard_normal((n, dim))
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    # Resample rows that collapsed to numerical zero; astronomically rare.
    while (norms < 1e-12).any():
        bad = norms[:, 0] < 1e-12
        v[bad] = rng.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(v, axis=1, keepdims=True)
    return v / norms


def sample_interior(K: ConvexBody, rng: np.random.Generator, n: int, alpha: float = 0.75) -> np.ndarray:
    """Random points of K as Dirichlet mixtures of its vertices.

    alpha < 1 pushes weight toward few vertices, covering the regions near
    the boundary better than a uniform mixture would.
    """
    w = rng.dirichlet(np.full(len(K.vertices), alpha), size=n)
    return w @ K.vertices


def sample_boundary(K: ConvexBody, rng: np.random.Generator, n: int) -> np.ndarray:
    """Boundary points by shooting random rays from an interior anchor."""
    if K.origin_interior:
        anchor = np.zeros(K.dim)
    else:
        anchor = K.vertices.mean(axis=0)
    return ray_boundary_many(K, anchor, random_directions(rng, K.dim, n))
