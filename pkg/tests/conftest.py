import numpy as np
import pytest

from polygeo import make_curve


def random_vertices(rng, n, d=2, noise=0.25):
    """A perturbed regular polygon (always regular, generic)."""
    t = 2 * np.pi * np.arange(n) / n
    x = np.zeros((n, d))
    x[:, 0], x[:, 1] = np.cos(t), np.sin(t)
    x += noise * rng.uniform(-1, 1, size=(n, d))
    return x


def random_curve(rng, n, d=2, noise=0.25):
    return make_curve(random_vertices(rng, n, d, noise))


def rel_err(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-300)
    return float(np.max(np.abs(a - b)) / scale)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
