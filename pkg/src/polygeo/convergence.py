"""Discrete-to-smooth convergence and completeness experiments.

Smooth closed curves and tangent fields are trigonometric polynomials on
``[0, 1)``.  The smooth Sobolev metric is evaluated independently of the
discrete code: arc-length derivatives are formed symbolically and the
integral is computed by composite Simpson quadrature with doubling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import sympy as sp

from .curves import CurvePath, DiscreteCurve, make_curve, unit_square
from .errors import QuadratureNotConverged
from .metric import MetricSpec, Variant, _spec, gm_inner, path_length

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """``f(t) = sum_k cos_coeffs[k] cos(2 pi k t) + sin_coeffs[k] sin(2 pi k t)``.

    Coefficient arrays have shape ``(K + 1, d)``; ``sin_coeffs[0]`` is unused.
    """

    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.cos_coeffs, dtype=float))
        b = np.atleast_2d(np.asarray(self.sin_coeffs, dtype=float))
        if a.shape != b.shape:
            raise ValueError("cos and sin coefficient arrays must have the same shape")
        object.__setattr__(self, "cos_coeffs", a)
        object.__setattr__(self, "sin_coeffs", b)

    @property
    def d(self):
        return self.cos_coeffs.shape[1]

    def __call__(self, t, deriv: int = 0):
        """Value (or exact ``deriv``-th derivative) at ``t``; returns ``(len(t), d)``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        k = np.arange(self.cos_coeffs.shape[0])
        w = TWO_PI * k
        phase = np.outer(t, w) + deriv * np.pi / 2
        scale = w ** deriv
        return (np.cos(phase) * scale) @ self.cos_coeffs + (np.sin(phase) * scale) @ self.sin_coeffs

    def symbolic(self, t):
        out = []
        for a in range(self.d):
            expr = sp.Integer(0)
            for k in range(self.cos_coeffs.shape[0]):
                ca, sa = float(self.cos_coeffs[k, a]), float(self.sin_coeffs[k, a])
                if ca:
                    expr += sp.Float(ca) * sp.cos(2 * sp.pi * k * t)
                if sa and k:
                    expr += sp.Float(sa) * sp.sin(2 * sp.pi * k * t)
            out.append(expr)
        return out

    @classmethod
    def constant(cls, vector):
        v = np.asarray(vector, dtype=float)[None, :]
        return cls(v, np.zeros_like(v))

    @classmethod
    def zero(cls, d):
        return cls(np.zeros((1, d)), np.zeros((1, d)))


@dataclass(frozen=True, eq=False)
class SmoothCurveSpec:
    """A closed curve ``c`` with tangent fields ``h`` and ``k`` (``k`` defaults to ``h``)."""

    curve: TrigPoly
    h: TrigPoly
    k: TrigPoly | None = None
    name: str = "custom"

    @property
    def k_field(self) -> TrigPoly:
        return self.h if self.k is None else self.k


def circle(field: str = "constant") -> SmoothCurveSpec:
    """Unit circle with ``h = k`` either the constant ``(1, 0)``, the curve itself, or zero."""
    c = TrigPoly([[0.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]])
    if field == "constant":
        h = TrigPoly.constant([1.0, 0.0])
    elif field == "identity":
        h = c
    elif field == "zero":
        h = TrigPoly.zero(2)
    else:
        raise ValueError(f"unknown field {field!r}")
    return SmoothCurveSpec(c, h, name=f"circle-{field}")


def ellipse_spec() -> SmoothCurveSpec:
    c = TrigPoly([[0.0, 0.0], [2.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]])
    h = TrigPoly([[0.2, 0.0], [0.0, 0.5], [0.3, 0.0]], [[0.0, 0.0], [1.0, 0.0], [0.0, -0.4]])
    k = TrigPoly([[0.0, 1.0], [0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.3], [0.2, 0.1]])
    return SmoothCurveSpec(c, h, k, name="ellipse")


def limacon_spec() -> SmoothCurveSpec:
    c = TrigPoly([[0.1, -0.2], [1.0, 0.0], [0.3, 0.0]], [[0.0, 0.0], [0.0, 1.0], [0.0, 0.3]])
    h = TrigPoly([[0.0, 0.0], [0.0, 0.4], [0.0, 0.0], [0.2, 0.0]],
                 [[0.0, 0.0], [0.7, 0.0], [0.0, 0.5], [0.0, 0.1]])
    return SmoothCurveSpec(c, h, name="limacon")


def space_curve_spec() -> SmoothCurveSpec:
    c = TrigPoly([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.25]],
                 [[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.25]])
    h = TrigPoly([[0.0, 0.0, 0.5], [0.3, 0.0, 0.0], [0.0, 0.2, 0.0]],
                 [[0.0, 0.0, 0.0], [0.0, 0.6, 0.0], [0.0, 0.0, 0.4]])
    k = TrigPoly([[1.0, 0.0, 0.0], [0.0, 0.0, 0.3], [0.0, 0.0, 0.0]],
                 [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.4, 0.1, 0.0]])
    return SmoothCurveSpec(c, h, k, name="space-curve")


NAMED_SPECS = {
    "circle": lambda: circle("constant"),
    "circle-identity": lambda: circle("identity"),
    "ellipse": ellipse_spec,
    "limacon": limacon_spec,
    "space-curve": space_curve_spec,
}


def named_spec(name: str) -> SmoothCurveSpec:
    try:
        return NAMED_SPECS[name]()
    except KeyError:
        raise ValueError(f"unknown curve spec {name!r}; choose from {sorted(NAMED_SPECS)}") from None


def sample_curve(spec: SmoothCurveSpec, n: int):
    """Sample ``c``, ``h``, ``k`` at ``t_i = i / n``.

    Returns ``(DiscreteCurve, h_array, k_array)``.

    Raises
    ------
    DegenerateCurve
        If two consecutive samples coincide.
    """
    if n < 3:
        raise ValueError("need n >= 3 samples")
    t = np.arange(n) / n
    return make_curve(spec.curve(t)), spec.h(t), spec.k_field(t)


def sample_operators(f, n: int):
    """Piecewise-constant sampling ``f(t_i)`` and forward difference ``n (f(t_{i+1}) - f(t_i))``."""
    t = np.arange(n) / n
    values = f(t)
    return values, n * (np.roll(values, -1, axis=0) - values)


@lru_cache(maxsize=64)
def _integrand(spec: SmoothCurveSpec, m: int):
    t = sp.Symbol("t", real=True)
    c = spec.curve.symbolic(t)
    speed = sp.sqrt(sum(sp.diff(ca, t) ** 2 for ca in c))

    def ds(fs):
        return [sp.diff(f, t) / speed for f in fs]

    h = spec.h.symbolic(t)
    k = spec.k_field.symbolic(t)
    dh, dk = h, k
    for _ in range(m):
        dh, dk = ds(dh), ds(dk)
    zero = sum(a * b for a, b in zip(h, k))
    high = sum(a * b for a, b in zip(dh, dk))
    return (sp.lambdify(t, speed, "numpy"), sp.lambdify(t, zero, "numpy"),
            sp.lambdify(t, high, "numpy"))


def _simpson_periodic(f, n):
    t = np.arange(n + 1) / n
    y = np.broadcast_to(np.asarray(f(t), dtype=float), t.shape)
    w = np.ones(n + 1)
    w[1:-1:2] = 4
    w[2:-1:2] = 2
    return float(np.dot(w, y) / (3 * n))


def _quadrature(f, tol, n0=64, n_max=2 ** 20):
    n = n0
    prev = _simpson_periodic(f, n)
    while n < n_max:
        n *= 2
        cur = _simpson_periodic(f, n)
        if abs(cur - prev) <= tol:
            return cur
        prev = cur
    raise QuadratureNotConverged(f"Simpson quadrature did not settle to {tol} by n={n}")


def smooth_metric_oracle(spec: SmoothCurveSpec, m: int,
                         variant: Variant | str = Variant.SCALE_INVARIANT,
                         tol: float = 1e-12) -> float:
    """Smooth Sobolev metric ``G^m_c(h, k)`` by symbolic derivatives and quadrature.

    ``G^m = int l^-3 <h, k> + l^(2m-3) <D_s^m h, D_s^m k> ds`` in the
    scale-invariant case; the constant-coefficient variant drops the powers
    of ``l``.  For ``m = 0`` both terms coincide, giving twice the ``L^2``
    term.
    """
    variant = Variant(variant)
    speed, zero, high = _integrand(spec, int(m))
    length = _quadrature(speed, tol)
    a = _quadrature(lambda t: zero(t) * speed(t), tol)
    b = _quadrature(lambda t: high(t) * speed(t), tol)
    if variant is Variant.SCALE_INVARIANT:
        return length ** -3 * a + length ** (2 * m - 3) * b
    return a + b


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    discrete_value: float
    oracle_value: float
    abs_error: float
    empirical_order: float = float("nan")


def discrete_value(spec: SmoothCurveSpec, n: int, metric) -> float:
    c, h, k = sample_curve(spec, n)
    return gm_inner(c, h, k, metric)


def convergence_table(spec: SmoothCurveSpec, m: int, variant=Variant.SCALE_INVARIANT,
                      n_list=(10, 20, 40, 80), oracle: float | None = None):
    """Discrete metric on sampled data versus the smooth oracle, one row per ``n``.

    The empirical order of row ``r`` is ``log(err_{r-1} / err_r) / log(n_r / n_{r-1})``.
    """
    metric = MetricSpec(m, variant)
    if oracle is None:
        oracle = smooth_metric_oracle(spec, m, variant)
    rows = []
    for n in n_list:
        val = discrete_value(spec, n, metric)
        err = abs(val - oracle)
        order = float("nan")
        if rows and rows[-1].abs_error > 0 and err > 0:
            order = math.log(rows[-1].abs_error / err) / math.log(n / rows[-1].n)
        rows.append(ConvergenceRow(n, val, oracle, err, order))
    return rows


# --- completeness probes ----------------------------------------------------

FAMILIES = ("edge-collapse", "vertex-escape", "global-shrink")


@dataclass(frozen=True, eq=False)
class DegenerationFamily:
    """A one-parameter family of curves degenerating as ``eps -> 0``.

    ``curve_at(eps)`` returns the vertex array at parameter ``eps`` and
    ``start`` is the parameter of the undeformed curve.

    - ``edge-collapse``: vertex ``index + 1`` slides along edge ``index``
      toward vertex ``index``; ``eps`` is that edge's length.
    - ``vertex-escape``: vertex ``index`` moves radially away from the
      centroid; ``eps`` is the reciprocal of its distance to the centroid.
    - ``global-shrink``: uniform scaling about the centroid; ``eps`` is the
      diameter.
    """

    kind: str
    base: DiscreteCurve = field(default_factory=unit_square)
    index: int = 0

    def __post_init__(self):
        if self.kind not in FAMILIES:
            raise ValueError(f"unknown family {self.kind!r}; choose from {FAMILIES}")

    @property
    def start(self) -> float:
        x = self.base.vertices
        if self.kind == "edge-collapse":
            return float(self.base.lengths[self.index])
        if self.kind == "vertex-escape":
            return 1.0 / float(np.linalg.norm(x[self.index] - x.mean(axis=0)))
        return _diameter(x)

    def curve_at(self, eps: float) -> np.ndarray:
        x = np.array(self.base.vertices)
        n = x.shape[0]
        i = self.index
        if self.kind == "edge-collapse":
            j = (i + 1) % n
            e = x[j] - x[i]
            x[j] = x[i] + e * (eps / np.linalg.norm(e))
            return x
        if self.kind == "vertex-escape":
            centre = x.mean(axis=0)
            r = x[i] - centre
            x[i] = centre + r * (1.0 / eps) / np.linalg.norm(r)
            return x
        centre = x.mean(axis=0)
        return centre + (x - centre) * (eps / _diameter(x))


def _diameter(x):
    diff = x[:, None, :] - x[None, :, :]
    return float(np.sqrt(np.max(np.sum(diff ** 2, axis=-1))))


def segment_length(family: DegenerationFamily, spec, eps_a: float, eps_b: float,
                   rtol: float = 0.01, t0: int = 8, t_max: int = 2 ** 16) -> float:
    """Length of the family between two parameters, refining the time grid.

    The parameter is interpolated geometrically; the grid doubles until the
    length changes by less than ``rtol``.
    """
    spec = _spec(spec)

    def length(T):
        s = np.linspace(0.0, 1.0, T + 1)
        eps = eps_a * (eps_b / eps_a) ** s
        frames = np.stack([family.curve_at(e) for e in eps])
        return path_length(CurvePath(frames), spec)

    T = t0
    prev = length(T)
    while T < t_max:
        T *= 2
        cur = length(T)
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    return prev


def completeness_probe(family, spec, eps_list, rtol: float = 0.01):
    """Cumulative metric length of a degenerating family at each ``eps``.

    Returns a list of ``(eps, cumulative_length)``, with ``eps_list`` sorted
    so the family moves monotonically toward degeneration.
    """
    if isinstance(family, str):
        family = DegenerationFamily(family)
    start = family.start
    eps_sorted = sorted(eps_list, key=lambda e: abs(math.log(e / start)))
    out = []
    total = 0.0
    prev = start
    for eps in eps_sorted:
        total += segment_length(family, spec, prev, eps, rtol=rtol)
        out.append((float(eps), total))
        prev = eps
    return out


def linear_fit(xs, ys):
    """Least-squares line through ``(xs, ys)``: returns ``(slope, intercept, r_squared)``."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    A = np.column_stack([xs, np.ones_like(xs)])
    (slope, intercept), *_ = np.linalg.lstsq(A, ys, rcond=None)
    resid = ys - (slope * xs + intercept)
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2
