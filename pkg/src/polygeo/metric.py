"""Discrete Sobolev metrics on regular closed polygons.

For a curve ``c`` with edge lengths ``|e_i|``, vertex weights ``mu_i`` and
total length ``l``, the order-``m`` term is::

    gdot^m_c(h, k) = sum_i l^(2m-3) <D_s^m h_i, D_s^m k_i> w_{i,m}

with ``w_{i,m} = mu_i`` for even ``m`` (including 0) and ``|e_i|`` for odd
``m``.  The metric is ``g^m = gdot^0 + gdot^m``; for ``m = 0`` this is
``2 gdot^0``.  The constant-coefficient variant drops every power of ``l``.

All ``*_array`` functions take vertex arrays of shape ``(..., n, d)`` and are
written so that complex inputs work (used for complex-step derivatives).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .curves import (CurvePath, DiscreteCurve, as_field, derivative_step, edge_lengths,
                     is_regular, vertex_weights)
from .errors import DegenerateCurve, NotPositiveDefinite


class Variant(str, Enum):
    SCALE_INVARIANT = "scale_invariant"
    CONSTANT_COEFFICIENT = "constant_coefficient"


@dataclass(frozen=True)
class MetricSpec:
    """Order ``m >= 0`` and variant of a discrete Sobolev metric."""

    m: int = 2
    variant: Variant = Variant.SCALE_INVARIANT

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 0:
            raise ValueError(f"metric order must be a non-negative integer, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "variant", Variant(self.variant))

    @property
    def scale_invariant(self) -> bool:
        return self.variant is Variant.SCALE_INVARIANT

    def to_dict(self):
        return {"m": self.m, "variant": self.variant.value}

    @classmethod
    def from_dict(cls, data):
        return cls(int(data["m"]), Variant(data.get("variant", "scale_invariant")))


def _spec(spec) -> MetricSpec:
    if isinstance(spec, MetricSpec):
        return spec
    if isinstance(spec, int):
        return MetricSpec(spec)
    raise TypeError(f"expected a MetricSpec, got {type(spec).__name__}")


def _geometry(x):
    lengths = edge_lengths(x)
    return lengths, vertex_weights(lengths), np.sum(lengths, axis=-1)


def _weight(m, lengths, mu):
    return mu if m % 2 == 0 else lengths


def _length_power(total, p, scale_invariant):
    if not scale_invariant:
        return 1.0
    return total ** p


def dot_array(x, h, k, m, scale_invariant=True):
    """``gdot^m`` for batched vertex arrays ``x`` and fields ``h``, ``k``."""
    lengths, mu, total = _geometry(x)
    dh, dk = h, k
    for step in range(m):
        dh = derivative_step(dh, step, lengths, mu)
        dk = derivative_step(dk, step, lengths, mu)
    s = np.sum(np.sum(dh * dk, axis=-1) * _weight(m, lengths, mu), axis=-1)
    return _length_power(total, 2 * m - 3, scale_invariant) * s


def inner_array(x, h, k, m, scale_invariant=True):
    return dot_array(x, h, k, 0, scale_invariant) + dot_array(x, h, k, m, scale_invariant)


def operator_array(x, m, scale_invariant=True):
    """Per-coordinate Gram matrix ``A`` with ``g(h, k) = sum_a h[:, a] @ A @ k[:, a]``.

    The difference operator ``D_s^m`` is assembled as an ``n x n`` matrix by
    applying the derivative recursion to the identity; ``A`` is then
    ``l^-3 diag(mu) + l^(2m-3) D^T diag(w) D``.  Batched over leading axes.
    """
    lengths, mu, total = _geometry(x)
    n = lengths.shape[-1]
    eye = np.broadcast_to(np.eye(n, dtype=lengths.dtype), lengths.shape + (n,))
    D = eye
    for step in range(m):
        D = derivative_step(D, step, lengths, mu)
    w = _weight(m, lengths, mu)
    high = np.einsum("...ki,...k,...kj->...ij", D, w, D)
    low = eye * mu[..., None, :]
    p0 = _length_power(total, -3, scale_invariant)
    pm = _length_power(total, 2 * m - 3, scale_invariant)
    if scale_invariant:
        p0 = p0[..., None, None]
        pm = pm[..., None, None]
    A = p0 * low + pm * high
    return 0.5 * (A + np.swapaxes(A, -1, -2))


def tensor_array(x, m, scale_invariant=True):
    """Full ``(n d) x (n d)`` metric tensor for row-major flattened fields."""
    A = operator_array(x, m, scale_invariant)
    d = x.shape[-1]
    eye = np.eye(d)
    n = A.shape[-1]
    G = A[..., :, None, :, None] * eye[:, None, :]
    return G.reshape(A.shape[:-2] + (n * d, n * d))


def gm_dot(c: DiscreteCurve, h, k, spec) -> float:
    """The order-``m`` term ``gdot^m_c(h, k)`` alone."""
    spec = _spec(spec)
    h, k = as_field(c, h).components, as_field(c, k).components
    return float(dot_array(c.vertices, h, k, spec.m, spec.scale_invariant))


def gm_inner(c: DiscreteCurve, h, k, spec) -> float:
    """The metric ``g^m_c(h, k) = gdot^0_c(h, k) + gdot^m_c(h, k)``."""
    spec = _spec(spec)
    h, k = as_field(c, h).components, as_field(c, k).components
    return float(inner_array(c.vertices, h, k, spec.m, spec.scale_invariant))


def gm_norm(c: DiscreteCurve, h, spec) -> float:
    return float(np.sqrt(gm_inner(c, h, h, spec)))


@dataclass(frozen=True, eq=False)
class MetricMatrix:
    """Dense metric tensor at ``base``, acting on row-major flattened fields."""

    base: DiscreteCurve
    spec: MetricSpec
    entries: np.ndarray

    @cached_property
    def factor(self):
        try:
            return cho_factor(self.entries, lower=True, check_finite=True)
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefinite(str(exc)) from None

    def solve(self, rhs):
        """``G^{-1} rhs`` for a flat vector or an ``(n, d)`` field."""
        rhs = np.asarray(rhs, dtype=float)
        return cho_solve(self.factor, rhs.reshape(self.entries.shape[0], -1)).reshape(rhs.shape)

    def quadratic(self, h, k=None):
        h = np.ravel(h)
        k = h if k is None else np.ravel(k)
        return float(h @ self.entries @ k)


def metric_matrix(c: DiscreteCurve, spec) -> MetricMatrix:
    """Assemble the metric tensor at ``c``.

    Raises
    ------
    NotPositiveDefinite
        If the Cholesky factorisation fails.
    """
    spec = _spec(spec)
    G = tensor_array(c.vertices, spec.m, spec.scale_invariant)
    G.setflags(write=False)
    mm = MetricMatrix(c, spec, G)
    mm.factor  # noqa: B018  (validate positive definiteness eagerly)
    return mm


def metric_matrix_columns(c: DiscreteCurve, spec) -> np.ndarray:
    """Reference assembly by evaluating :func:`gm_inner` on coordinate fields."""
    spec = _spec(spec)
    N = c.n * c.d
    basis = np.eye(N).reshape(N, c.n, c.d)
    G = np.empty((N, N))
    for a in range(N):
        G[a] = inner_array(c.vertices, basis[a], basis, spec.m, spec.scale_invariant)
    return G


def _path_frames(path):
    return path.frames if isinstance(path, CurvePath) else np.asarray(path, dtype=float)


def speed_squared_array(frames, m, scale_invariant=True):
    """Squared speeds ``g_mid(v_t, v_t)`` on each interval of a path.

    Velocities are forward differences; the metric is evaluated at the
    vertex-wise midpoint of the two frames.
    """
    T = frames.shape[0] - 1
    if T < 1:
        return np.zeros(0)
    mid = 0.5 * (frames[1:] + frames[:-1])
    for t, curve in enumerate(mid):
        if not is_regular(curve):
            raise DegenerateCurve(f"midpoint curve of interval {t} is not regular")
    v = (frames[1:] - frames[:-1]) * T
    return inner_array(mid, v, v, m, scale_invariant)


def path_energy(path, spec) -> float:
    """``sum_t dt * g_mid(v_t, v_t)`` over the uniform time grid on ``[0, 1]``."""
    spec = _spec(spec)
    frames = _path_frames(path)
    q = speed_squared_array(frames, spec.m, spec.scale_invariant)
    return float(np.sum(q) / max(len(q), 1))


def path_length(path, spec) -> float:
    """``sum_t dt * sqrt(g_mid(v_t, v_t))`` over the uniform time grid on ``[0, 1]``."""
    spec = _spec(spec)
    frames = _path_frames(path)
    q = speed_squared_array(frames, spec.m, spec.scale_invariant)
    return float(np.sum(np.sqrt(np.maximum(q, 0.0))) / max(len(q), 1))


def lipschitz_witness(c: DiscreteCurve, h) -> tuple[float, float]:
    """Both sides of the Lipschitz bound for ``sqrt(l(c))``.

    Returns ``(|d sqrt(l) / dh|, sqrt(gtilde^2_c(h, h)))`` where the second
    entry uses the constant-coefficient metric of order 2.  The first never
    exceeds the second.
    """
    h = as_field(c, h).components
    dl = np.sum(np.sum((np.roll(h, -1, axis=0) - h) * c.edges, axis=1) / c.lengths)
    first = abs(dl) / (2.0 * np.sqrt(c.length))
    second = np.sqrt(inner_array(c.vertices, h, h, 2, scale_invariant=False))
    return float(first), float(second)
