"""Closed polygons in R^d and their discrete arc-length derivatives.

A discrete curve is a cyclic sequence of ``n >= 3`` vertices with no two
consecutive vertices equal.  Vertex ``i`` is joined to vertex ``i + 1 (mod n)``
by the edge ``e_i``.  Vertex weights ``mu_i`` average the two edges meeting at
vertex ``i``.

The array-level helpers (``edge_vectors``, ``edge_lengths``, ...) accept
arrays of shape ``(..., n, d)`` and any floating or complex dtype, so they can
be batched and used with complex-step differentiation.  They never call
``abs``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateCurve, InvalidRotation

#: relative tolerance used for the regularity test
REGULARITY_RTOL = 1e-12


def edge_vectors(x):
    """Edges ``e_i = x_{i+1} - x_i`` of a (batch of) vertex arrays."""
    return np.roll(x, -1, axis=-2) - x


def edge_lengths(x):
    e = edge_vectors(x)
    return np.sqrt(np.sum(e * e, axis=-1))


def vertex_weights(lengths):
    """``mu_i = (|e_i| + |e_{i-1}|) / 2`` from edge lengths of shape ``(..., n)``."""
    return 0.5 * (lengths + np.roll(lengths, 1, axis=-1))


def derivative_step(values, j, lengths, mu):
    """Map ``D_s^j h`` to ``D_s^{j+1} h``.

    Even orders (including 0) live on vertices and are differenced forward
    over edge lengths, giving an edge-based field; odd orders live on edges
    and are differenced backward over vertex weights.
    """
    if j % 2 == 0:
        return (np.roll(values, -1, axis=-2) - values) / lengths[..., None]
    return (values - np.roll(values, 1, axis=-2)) / mu[..., None]


def derivative(x, h, j):
    """``D_s^j h`` for vertex arrays ``x`` and fields ``h`` of shape ``(..., n, d)``."""
    lengths = edge_lengths(x)
    mu = vertex_weights(lengths)
    out = h
    for step in range(j):
        out = derivative_step(out, step, lengths, mu)
    return out


def regularity_tolerance(lengths):
    mean = float(np.mean(np.real(lengths)))
    return REGULARITY_RTOL * (mean if mean > 0 else 1.0)


def is_regular(x):
    lengths = np.real(edge_lengths(np.asarray(x)))
    return bool(np.all(lengths > regularity_tolerance(lengths)))


@dataclass(frozen=True, eq=False)
class DiscreteCurve:
    """An immutable regular closed polygon.

    Use :func:`make_curve` to build one from a list of points.  Derived
    quantities are computed once at construction.
    """

    vertices: np.ndarray
    edges: np.ndarray = field(init=False, repr=False)
    lengths: np.ndarray = field(init=False, repr=False)
    mu: np.ndarray = field(init=False, repr=False)
    length: float = field(init=False)

    def __post_init__(self):
        x = np.array(self.vertices, dtype=float)
        if x.ndim != 2:
            raise ValueError("vertices must be an (n, d) array")
        if x.shape[0] < 3:
            raise ValueError(f"need at least 3 vertices, got {x.shape[0]}")
        if x.shape[1] < 1:
            raise ValueError("spatial dimension must be at least 1")
        if not np.all(np.isfinite(x)):
            raise ValueError("vertices must be finite")
        e = edge_vectors(x)
        lengths = np.linalg.norm(e, axis=1)
        tol = regularity_tolerance(lengths)
        bad = np.flatnonzero(lengths <= tol)
        if bad.size:
            raise DegenerateCurve(
                f"edge(s) {bad.tolist()} have length <= {tol:.3g}")
        x.setflags(write=False)
        e.setflags(write=False)
        lengths.setflags(write=False)
        mu = vertex_weights(lengths)
        mu.setflags(write=False)
        object.__setattr__(self, "vertices", x)
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "length", float(lengths.sum()))

    @property
    def n(self) -> int:
        return self.vertices.shape[0]

    @property
    def d(self) -> int:
        return self.vertices.shape[1]

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, DiscreteCurve):
            return NotImplemented
        return np.array_equal(self.vertices, other.vertices)

    __hash__ = None

    def to_dict(self):
        return {"d": self.d, "vertices": self.vertices.tolist()}

    @classmethod
    def from_dict(cls, data):
        curve = make_curve(data["vertices"])
        if "d" in data and int(data["d"]) != curve.d:
            raise ValueError(f"declared d={data['d']} but vertices have d={curve.d}")
        return curve


@dataclass(frozen=True, eq=False)
class TangentField:
    """A vector ``h_i`` attached to each vertex of ``base``."""

    base: DiscreteCurve
    components: np.ndarray

    def __post_init__(self):
        h = np.array(self.components, dtype=float)
        if h.shape != self.base.vertices.shape:
            raise ValueError(
                f"field shape {h.shape} does not match curve shape {self.base.vertices.shape}")
        h.setflags(write=False)
        object.__setattr__(self, "components", h)

    def __add__(self, other):
        return TangentField(self.base, self.components + _components(other))

    def __sub__(self, other):
        return TangentField(self.base, self.components - _components(other))

    def __mul__(self, scalar):
        return TangentField(self.base, self.components * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return TangentField(self.base, -self.components)

    def to_dict(self):
        return {"d": self.base.d, "vectors": self.components.tolist()}


def _components(h):
    return h.components if isinstance(h, TangentField) else np.asarray(h, dtype=float)


@dataclass(frozen=True, eq=False)
class DerivedField:
    order: int
    values: np.ndarray

    @property
    def parity(self) -> str:
        """``"vertex"`` for even orders, ``"edge"`` for odd orders."""
        return "vertex" if self.order % 2 == 0 else "edge"


def make_curve(vertices) -> DiscreteCurve:
    """Build a :class:`DiscreteCurve` from an ``(n, d)`` sequence of points.

    Raises
    ------
    DegenerateCurve
        If two consecutive vertices (cyclically) coincide.
    """
    return DiscreteCurve(np.asarray(vertices, dtype=float))


def as_field(c: DiscreteCurve, h) -> TangentField:
    if isinstance(h, TangentField):
        if h.base is not c and h.components.shape != c.vertices.shape:
            raise ValueError("tangent field is attached to a different curve shape")
        return h
    return TangentField(c, h)


def discrete_derivative(c: DiscreteCurve, h, j: int) -> DerivedField:
    """Discrete arc-length derivative ``D_s^j h`` of a tangent field.

    Parameters
    ----------
    c : DiscreteCurve
    h : TangentField or array_like, shape (n, d)
    j : int
        Order, ``j >= 0``.  Order 0 returns the field itself.
    """
    if j < 0:
        raise ValueError("derivative order must be non-negative")
    h = as_field(c, h).components
    out = h
    for step in range(j):
        out = derivative_step(out, step, c.lengths, c.mu)
    out = np.array(out)
    out.setflags(write=False)
    return DerivedField(j, out)


def cyclic_shift(c: DiscreteCurve, j: int) -> DiscreteCurve:
    """Relabel vertices so that vertex ``i`` of the result is vertex ``i + j`` of ``c``."""
    return make_curve(np.roll(c.vertices, -int(j), axis=0))


def shift_field(h, j: int):
    """Apply the same relabelling as :func:`cyclic_shift` to a field array."""
    return np.roll(np.asarray(_components(h)), -int(j), axis=0)


def check_rotation(R, d: int) -> np.ndarray:
    R = np.asarray(R, dtype=float)
    if R.shape != (d, d):
        raise InvalidRotation(f"rotation must be {d}x{d}, got {R.shape}")
    if np.max(np.abs(R.T @ R - np.eye(d))) > 1e-10:
        raise InvalidRotation("R is not orthogonal")
    if np.linalg.det(R) < 0:
        raise InvalidRotation("R has determinant -1")
    return R


def similarity_transform(c: DiscreteCurve, scale: float = 1.0, R=None, v=None) -> DiscreteCurve:
    """Map every vertex to ``scale * R @ c_i + v``."""
    if not scale > 0:
        raise ValueError("scale must be positive")
    R = np.eye(c.d) if R is None else check_rotation(R, c.d)
    v = np.zeros(c.d) if v is None else np.asarray(v, dtype=float)
    return make_curve(scale * c.vertices @ R.T + v)


def rotation_2d(angle: float) -> np.ndarray:
    ca, sa = np.cos(angle), np.sin(angle)
    return np.array([[ca, -sa], [sa, ca]])


def random_rotation(d: int, rng) -> np.ndarray:
    """Haar-distributed element of SO(d)."""
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def regular_polygon(n: int, radius: float = 1.0) -> DiscreteCurve:
    t = 2 * np.pi * np.arange(n) / n
    return make_curve(radius * np.column_stack([np.cos(t), np.sin(t)]))


def unit_square() -> DiscreteCurve:
    return make_curve([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


@dataclass(frozen=True, eq=False)
class CurvePath:
    """Curves sampled on the uniform time grid ``t_k = k / T``, ``k = 0..T``.

    ``frames`` has shape ``(T + 1, n, d)``.  A single frame (``T = 0``) is a
    degenerate but valid path used for empty inputs.
    """

    frames: np.ndarray
    times: np.ndarray = field(default=None)

    def __post_init__(self):
        f = np.array(self.frames, dtype=float)
        if f.ndim != 3:
            raise ValueError("frames must have shape (T+1, n, d)")
        if f.shape[0] == 0:
            raise ValueError("a path needs at least one frame")
        for k, frame in enumerate(f):
            if not is_regular(frame):
                raise DegenerateCurve(f"frame {k} is not a regular curve")
        steps = f.shape[0] - 1
        expected = np.linspace(0.0, 1.0, steps + 1) if steps else np.zeros(1)
        t = expected if self.times is None else np.array(self.times, dtype=float)
        if t.shape != expected.shape or np.max(np.abs(t - expected)) > 1e-12:
            raise ValueError("times must be the uniform grid on [0, 1]")
        f.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "frames", f)
        object.__setattr__(self, "times", t)

    @property
    def steps(self) -> int:
        return self.frames.shape[0] - 1

    @property
    def dt(self) -> float:
        return 1.0 / self.steps if self.steps else 0.0

    def __len__(self):
        return self.frames.shape[0]

    def curve(self, k: int) -> DiscreteCurve:
        return make_curve(self.frames[k])

    @property
    def start(self) -> DiscreteCurve:
        return self.curve(0)

    @property
    def end(self) -> DiscreteCurve:
        return self.curve(-1)

    @classmethod
    def from_curves(cls, curves):
        return cls(np.stack([c.vertices if isinstance(c, DiscreteCurve) else np.asarray(c)
                             for c in curves]))

    def to_dict(self):
        d = self.frames.shape[2]
        return {"times": self.times.tolist(),
                "frames": [{"d": d, "vertices": fr.tolist()} for fr in self.frames]}

    @classmethod
    def from_dict(cls, data):
        frames = [DiscreteCurve.from_dict(fr).vertices for fr in data["frames"]]
        return cls(np.stack(frames), data.get("times"))
