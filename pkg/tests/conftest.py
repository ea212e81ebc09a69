import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    max_examples=30,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("suite")


@pytest.fixture
def rng():
    return np.random.default_rng(20260822)


def random_hull_points(rng, dim, n, spread=1.0):
    """Points on a random ellipsoid shell, so most of them end up extreme."""
    dirs = rng.normal(size=(n, dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = rng.uniform(0.6, 1.0, size=n)
    axes = rng.uniform(0.5, 1.5, size=dim) * spread
    return dirs * radii[:, None] * axes[None, :]
