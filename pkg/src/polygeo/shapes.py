"""Curvature of the space of planar triangles modulo similarity.

Triangles are represented in the slice ``c1 = (0, 0)``, ``c2 = (1, 0)``,
``c3 = (x, y)``.  The chart points ``(0, 0)`` and ``(1, 0)`` are punctures
(two coincident vertices); the third puncture sits at infinity.

The quotient metric is the ambient metric restricted to the horizontal
space, the orthogonal complement of the orbit directions of translation,
rotation and scaling.  Kendall's metric is handled the same way, using the
ambient inner product ``4 <h, k> / |c - mean(c)|^2`` whose quotient is the
round sphere of curvature 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConfiguration, NearPuncture, NumericallyUnstable
from .metric import MetricSpec, Variant, operator_array

KENDALL = "kendall"
#: radius of the disks around the punctures where no evaluation happens
EXCLUSION_RADIUS = 0.02
#: finite-difference step used for the curvature
CURVATURE_STEP = 1e-4
#: curvature of Kendall's classical triangle sphere of radius 1/2
KENDALL_CLASSICAL_CURVATURE = 4.0
MAX_CONDITION = 1e10

PUNCTURES = np.array([[0.0, 0.0], [1.0, 0.0]])
EQUILATERAL = (0.5, np.sqrt(3.0) / 2.0)


def parse_metric(metric):
    """Accept a MetricSpec, ``"kendall"`` or ``"g0"``, ``"g1"``, ... strings."""
    if isinstance(metric, MetricSpec):
        if not metric.scale_invariant:
            raise ValueError("the quotient by scaling needs a scale-invariant metric")
        return metric
    if isinstance(metric, str):
        key = metric.strip().lower()
        if key == KENDALL:
            return KENDALL
        if key.startswith("g") and key[1:].isdigit():
            return MetricSpec(int(key[1:]), Variant.SCALE_INVARIANT)
    if isinstance(metric, int):
        return MetricSpec(metric)
    raise ValueError(f"unknown metric {metric!r}")


def chart_triangle(x: float, y: float) -> np.ndarray:
    return np.array([[0.0, 0.0], [1.0, 0.0], [x, y]])


def puncture_distance(x: float, y: float) -> float:
    return float(np.min(np.hypot(x - PUNCTURES[:, 0], y - PUNCTURES[:, 1])))


def _check_point(x, y, r_excl):
    if puncture_distance(x, y) < r_excl:
        raise NearPuncture(f"({x:.4g}, {y:.4g}) is within {r_excl} of a puncture")


def ambient_gram(tri: np.ndarray, metric) -> np.ndarray:
    """6x6 ambient metric tensor at a triangle, row-major flattened."""
    if metric == KENDALL:
        centered = tri - tri.mean(axis=0)
        r2 = float(np.sum(centered ** 2))
        if r2 <= 0:
            raise DegenerateConfiguration("all vertices coincide")
        return 4.0 * np.eye(tri.size) / r2
    A = operator_array(tri, metric.m, True)
    return np.kron(A, np.eye(2))


def vertical_basis(tri: np.ndarray) -> np.ndarray:
    """Rows: the two translations, the infinitesimal rotation, the scaling."""
    n = tri.shape[0]
    tx = np.tile([1.0, 0.0], n)
    ty = np.tile([0.0, 1.0], n)
    rot = np.column_stack([-tri[:, 1], tri[:, 0]]).ravel()
    return np.stack([tx, ty, rot, tri.ravel()])


def chart_tangents(n: int = 3) -> np.ndarray:
    T = np.zeros((2, 2 * n))
    T[0, 2 * n - 2] = 1.0
    T[1, 2 * n - 1] = 1.0
    return T


def horizontal_projection(G: np.ndarray, V: np.ndarray, X: np.ndarray) -> np.ndarray:
    """G-orthogonal projection of the rows of ``X`` off the span of the rows of ``V``."""
    W = V @ G @ V.T
    cond = np.linalg.cond(W)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise NumericallyUnstable(f"vertical Gram matrix has condition number {cond:.3g}")
    L = np.linalg.cholesky(W)
    coeffs = np.linalg.solve(L.T, np.linalg.solve(L, V @ G @ X.T))
    return X - coeffs.T @ V


@dataclass(frozen=True)
class QuotientMetric2x2:
    point: tuple[float, float]
    entries: np.ndarray

    @property
    def E(self):
        return self.entries[0, 0]

    @property
    def F(self):
        return self.entries[0, 1]

    @property
    def G(self):
        return self.entries[1, 1]


def _quotient_entries(x, y, metric, tangents=None):
    tri = chart_triangle(x, y)
    G = ambient_gram(tri, metric)
    V = vertical_basis(tri)
    X = chart_tangents() if tangents is None else tangents
    H = horizontal_projection(G, V, X)
    q = H @ G @ H.T
    return 0.5 * (q + q.T)


def quotient_metric(x: float, y: float, metric, r_excl: float = EXCLUSION_RADIUS,
                    tangents=None) -> QuotientMetric2x2:
    """Quotient metric at chart point ``(x, y)`` as a 2x2 matrix.

    ``metric`` is a scale-invariant :class:`MetricSpec`, ``"g<m>"`` or
    ``"kendall"``.  ``tangents`` overrides the two chart tangent vectors
    (flattened 6-vectors); used to check that vertical components drop out.
    """
    metric = parse_metric(metric)
    _check_point(x, y, r_excl)
    return QuotientMetric2x2((float(x), float(y)), _quotient_entries(x, y, metric, tangents))


def brioschi(E, F, G, Eu, Ev, Fu, Fv, Gu, Gv, Evv, Fuv, Guu) -> float:
    """Gaussian curvature from a 2x2 metric and its derivatives."""
    m1 = np.array([[-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev],
                   [Fv - 0.5 * Gu, E, F],
                   [0.5 * Gv, F, G]])
    m2 = np.array([[0.0, 0.5 * Ev, 0.5 * Gu],
                   [0.5 * Ev, E, F],
                   [0.5 * Gu, F, G]])
    return float((np.linalg.det(m1) - np.linalg.det(m2)) / (E * G - F * F) ** 2)


def gaussian_curvature(x: float, y: float, metric, step: float = CURVATURE_STEP,
                       r_excl: float = EXCLUSION_RADIUS) -> float:
    """Gaussian curvature of the quotient metric at chart point ``(x, y)``.

    Derivatives of the metric coefficients are central differences with
    step ``step`` on a 3x3 stencil.

    Raises
    ------
    NearPuncture
    NumericallyUnstable
        If the 2x2 metric has condition number above 1e10.
    """
    metric = parse_metric(metric)
    _check_point(x, y, r_excl)
    h = step
    q = np.empty((3, 3, 2, 2))
    for a, du in enumerate((-h, 0.0, h)):
        for b, dv in enumerate((-h, 0.0, h)):
            q[a, b] = _quotient_entries(x + du, y + dv, metric)
    c = q[1, 1]
    cond = np.linalg.cond(c)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise NumericallyUnstable(f"quotient metric has condition number {cond:.3g}")
    E, F, G = q[..., 0, 0], q[..., 0, 1], q[..., 1, 1]

    def du(f):
        return (f[2, 1] - f[0, 1]) / (2 * h)

    def dv(f):
        return (f[1, 2] - f[1, 0]) / (2 * h)

    Evv = (E[1, 2] - 2 * E[1, 1] + E[1, 0]) / h ** 2
    Guu = (G[2, 1] - 2 * G[1, 1] + G[0, 1]) / h ** 2
    Fuv = (F[2, 2] - F[2, 0] - F[0, 2] + F[0, 0]) / (4 * h ** 2)
    return brioschi(E[1, 1], F[1, 1], G[1, 1], du(E), dv(E), du(F), dv(F), du(G), dv(G),
                    Evv, Fuv, Guu)


def symlog(x):
    """``sign(x) * log(|x + sign(x)|)``, i.e. ``sign(x) * log(1 + |x|)``."""
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.log1p(np.abs(x))


@dataclass(frozen=True, eq=False)
class CurvatureGrid:
    """Curvature samples on a rectangular grid; ``values[j, i]`` is at ``(xs[i], ys[j])``."""

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray
    transformed: np.ndarray | None = None

    def rows(self):
        """Row-major ``(x, y, K[, K_symlog])`` tuples with ``None`` for missing values."""
        for j, y in enumerate(self.ys):
            for i, x in enumerate(self.xs):
                k = self.values[j, i]
                row = [float(x), float(y), None if np.isnan(k) else float(k)]
                if self.transformed is not None:
                    s = self.transformed[j, i]
                    row.append(None if np.isnan(s) else float(s))
                yield tuple(row)


def curvature_grid(region, resolution, metric, transform: str | None = None,
                   r_excl: float = EXCLUSION_RADIUS, step: float = CURVATURE_STEP) -> CurvatureGrid:
    """Evaluate :func:`gaussian_curvature` on a grid.

    Parameters
    ----------
    region : (x0, x1, y0, y1)
    resolution : (nx, ny)
    transform : {None, "none", "symlog"}

    Points inside the puncture disks, or where evaluation fails numerically,
    are stored as NaN.
    """
    metric = parse_metric(metric)
    x0, x1, y0, y1 = map(float, region)
    nx, ny = map(int, resolution)
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    K = np.full((ny, nx), np.nan)
    for j, y in enumerate(ys):
        for i, x in enumerate(xs):
            try:
                K[j, i] = gaussian_curvature(x, y, metric, step=step, r_excl=r_excl)
            except (NearPuncture, NumericallyUnstable, DegenerateConfiguration,
                    np.linalg.LinAlgError):
                pass
    if transform in (None, "none"):
        return CurvatureGrid(xs, ys, K)
    if transform == "symlog":
        return CurvatureGrid(xs, ys, K, symlog(K))
    raise ValueError(f"unknown transform {transform!r}")


def _preshape(config) -> np.ndarray:
    z = np.asarray(config, dtype=float)
    if z.ndim != 2 or z.shape[1] != 2:
        raise ValueError("Kendall distance is implemented for planar configurations")
    w = z[:, 0] + 1j * z[:, 1]
    w = w - w.mean()
    norm = np.sqrt(np.sum(np.abs(w) ** 2))
    if norm == 0:
        raise DegenerateConfiguration("configuration has zero centred norm")
    return w / norm


def kendall_distance(t1, t2) -> float:
    """Geodesic distance between two planar shapes on the curvature-1 Kendall sphere.

    This is twice the classical Procrustes angle ``arccos |<z1, z2>|``.  It is
    evaluated through the residual of the optimal rotation, which stays
    accurate for nearly identical shapes.
    """
    z1, z2 = _preshape(t1), _preshape(t2)
    if z1.shape != z2.shape:
        raise ValueError("configurations must have the same number of points")
    ip = np.vdot(z2, z1)
    phase = ip / abs(ip) if abs(ip) > 0 else 1.0
    r = np.sqrt(np.sum(np.abs(z1 - phase * z2) ** 2))
    return float(4.0 * np.arcsin(min(r / 2.0, 1.0)))


def chart_point(triangle) -> tuple[float, float]:
    """Chart coordinates of a triangle's shape (first two vertices sent to (0,0), (1,0))."""
    z = _as_complex(triangle)
    if z[1] == z[0]:
        raise DegenerateConfiguration("first two vertices coincide")
    w = (z[2] - z[0]) / (z[1] - z[0])
    return float(w.real), float(w.imag)


def _as_complex(config):
    z = np.asarray(config, dtype=float)
    return z[:, 0] + 1j * z[:, 1]


def ring_points(center, radius: float, count: int = 16) -> np.ndarray:
    t = 2 * np.pi * (np.arange(count) + 0.5) / count
    return np.asarray(center, dtype=float) + radius * np.column_stack([np.cos(t), np.sin(t)])
