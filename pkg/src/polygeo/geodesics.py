"""Geodesic initial and boundary value problems on regular polygons.

Metric derivatives are taken by complex-step differentiation of the metric
assembly (exact to rounding); central finite differences are available for
comparison.  The exponential map integrates ``c'' = -Gamma(c', c')`` and the
log map minimises the discrete path energy over interior frames (path
straightening) with L-BFGS-B.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular
from scipy.optimize import minimize

from .curves import CurvePath, DiscreteCurve, TangentField, as_field, is_regular, make_curve
from .errors import (DegenerateCurve, InitializationFailed, LeftTheSpace, MaxIterations,
                     NotPositiveDefinite, TooLarge)
from .metric import (MetricSpec, _spec, inner_array, operator_array, speed_squared_array,
                     tensor_array)

log = logging.getLogger(__name__)

COMPLEX_STEP = 1e-20
#: default relative step for central-difference metric derivatives
CENTRAL_RSTEP = 1e-5
MAX_DENSE_DIM = 64


def _factor(A):
    try:
        return cho_factor(A, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None


def _basis(n, d):
    N = n * d
    return np.eye(N).reshape(N, n, d)


def quadratic_gradient(x, v, m, scale_invariant=True):
    """Gradient in ``x`` of ``g_x(v, v)`` by complex step; batched over leading axes.

    ``x`` and ``v`` have shape ``(..., n, d)``; returns the same shape.
    """
    n, d = x.shape[-2:]
    E = _basis(n, d)
    xs = x[..., None, :, :] + 1j * COMPLEX_STEP * E
    q = inner_array(xs, v[..., None, :, :], v[..., None, :, :], m, scale_invariant)
    return (q.imag / COMPLEX_STEP).reshape(x.shape)


def operator_directional(x, v, m, scale_invariant=True):
    """Directional derivative of the per-coordinate Gram matrix along ``v``."""
    A = operator_array(x + 1j * COMPLEX_STEP * v, m, scale_invariant)
    return A.imag / COMPLEX_STEP


def geodesic_acceleration(x, v, spec) -> np.ndarray:
    """``-Gamma_x(v, v)`` computed as ``-G^-1 (dG[v] v - 1/2 grad g(v, v))``."""
    spec = _spec(spec)
    si = spec.scale_invariant
    A = operator_array(x, spec.m, si)
    dA = operator_directional(x, v, spec.m, si)
    rhs = dA @ v - 0.5 * quadratic_gradient(x, v, spec.m, si)
    return -cho_solve(_factor(A), rhs)


@dataclass(frozen=True, eq=False)
class ChristoffelTensor:
    """Christoffel symbols ``entries[k, i, j] = Gamma^k_ij`` in flattened coordinates."""

    base: DiscreteCurve
    spec: MetricSpec
    entries: np.ndarray

    def contract(self, u, w=None):
        """``Gamma(u, w)`` as an ``(n, d)`` array."""
        u = np.ravel(u)
        w = u if w is None else np.ravel(w)
        return np.einsum("kij,i,j->k", self.entries, u, w).reshape(self.base.vertices.shape)


def metric_derivatives(c: DiscreteCurve, spec, method="complex", step=None) -> np.ndarray:
    """``dG[l] = d G / d x_l`` for every flattened coordinate ``l``."""
    spec = _spec(spec)
    x = c.vertices
    E = _basis(c.n, c.d)
    if method == "complex":
        G = tensor_array(x + 1j * COMPLEX_STEP * E, spec.m, spec.scale_invariant)
        return G.imag / COMPLEX_STEP
    if method == "central":
        h = CENTRAL_RSTEP * float(np.mean(c.lengths)) if step is None else step
        Gp = tensor_array(x + h * E, spec.m, spec.scale_invariant)
        Gm = tensor_array(x - h * E, spec.m, spec.scale_invariant)
        return (Gp - Gm) / (2 * h)
    raise ValueError(f"unknown differentiation method {method!r}")


def christoffel(c: DiscreteCurve, spec, method="complex", step=None,
                max_dim=MAX_DENSE_DIM) -> ChristoffelTensor:
    """Levi-Civita Christoffel symbols of ``g^m`` at ``c``.

    ``Gamma^k_ij = 1/2 G^kl (d_i G_lj + d_j G_li - d_l G_ij)``.  ``method`` is
    ``"complex"`` (complex step, default) or ``"central"`` (central
    differences with step ``step``, default ``1e-5`` times the mean edge).
    """
    spec = _spec(spec)
    N = c.n * c.d
    if N > max_dim:
        raise TooLarge(f"n*d = {N} exceeds the dense limit {max_dim}")
    dG = metric_derivatives(c, spec, method, step)
    G = tensor_array(c.vertices, spec.m, spec.scale_invariant)
    # lower[l, i, j] = d_i G_lj + d_j G_li - d_l G_ij
    lower = np.einsum("ilj->lij", dG) + np.einsum("jli->lij", dG) - dG
    gamma = 0.5 * cho_solve(_factor(G), lower.reshape(N, N * N)).reshape(N, N, N)
    gamma = 0.5 * (gamma + np.swapaxes(gamma, 1, 2))
    return ChristoffelTensor(c, spec, gamma)


def _check_stage(x, t):
    if not is_regular(x):
        raise LeftTheSpace(f"curve left the space of regular polygons near t={t:.6g}")


def exp_map(c: DiscreteCurve, v, spec, steps: int = 100, method: str = "rk4") -> CurvePath:
    """Integrate the geodesic from ``c`` with initial velocity ``v`` over ``[0, 1]``.

    Parameters
    ----------
    steps : int
        Number of fixed steps of size ``1/steps``.
    method : {"rk4", "euler"}
        ``"euler"`` is the explicit one-step Euler scheme.

    Returns
    -------
    CurvePath
        All ``steps + 1`` frames.

    Raises
    ------
    LeftTheSpace
        If any intermediate stage has coincident consecutive vertices.
    """
    spec = _spec(spec)
    if steps < 1:
        raise ValueError("steps must be >= 1")
    method = method.lower()
    if method not in ("rk4", "euler"):
        raise ValueError(f"unknown integrator {method!r}")
    x = np.array(c.vertices)
    p = np.array(as_field(c, v).components)
    dt = 1.0 / steps
    frames = [x.copy()]

    def f(xs, ps, t):
        _check_stage(xs, t)
        return ps, geodesic_acceleration(xs, ps, spec)

    for s in range(steps):
        t = s * dt
        if method == "euler":
            dx, dp = f(x, p, t)
            x, p = x + dt * dx, p + dt * dp
        else:
            k1x, k1p = f(x, p, t)
            k2x, k2p = f(x + 0.5 * dt * k1x, p + 0.5 * dt * k1p, t + 0.5 * dt)
            k3x, k3p = f(x + 0.5 * dt * k2x, p + 0.5 * dt * k2p, t + 0.5 * dt)
            k4x, k4p = f(x + dt * k3x, p + dt * k3p, t + dt)
            x = x + dt / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
            p = p + dt / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
        _check_stage(x, t + dt)
        frames.append(x.copy())
    return CurvePath(np.stack(frames))


def geodesic_speed_profile(path: CurvePath, spec) -> np.ndarray:
    """Speeds ``sqrt(g_mid(v_t, v_t))`` on every interval of ``path``."""
    spec = _spec(spec)
    q = speed_squared_array(path.frames, spec.m, spec.scale_invariant)
    return np.sqrt(np.maximum(q, 0.0))


def momentum(c: DiscreteCurve, v, spec) -> np.ndarray:
    """Metric dual ``G v`` of a velocity, as an ``(n, d)`` array."""
    spec = _spec(spec)
    return operator_array(c.vertices, spec.m, spec.scale_invariant) @ as_field(c, v).components


def linear_momentum(c: DiscreteCurve, v, spec) -> np.ndarray:
    """Conserved quantity of translation invariance: ``sum_i (G v)_i``."""
    return momentum(c, v, spec).sum(axis=0)


def angular_momentum(c: DiscreteCurve, v, spec):
    """Conserved quantity of rotation invariance (planar curves: a scalar)."""
    p = momentum(c, v, spec)
    x = c.vertices
    if c.d == 2:
        return float(np.sum(x[:, 0] * p[:, 1] - x[:, 1] * p[:, 0]))
    return np.einsum("ia,ib->ab", x, p) - np.einsum("ia,ib->ba", x, p)


def scaling_momentum(c: DiscreteCurve, v, spec) -> float:
    """Conserved for the scale-invariant variant: ``<c, G v>``."""
    return float(np.sum(c.vertices * momentum(c, v, spec)))


# --- boundary value problem -------------------------------------------------


class _Degenerate(Exception):
    pass


def _energy_and_gradient(interior, c0, c1, m, si):
    frames = np.concatenate([c0[None], interior, c1[None]])
    K = frames.shape[0] - 1
    if not all(is_regular(fr) for fr in frames[1:-1]):
        raise _Degenerate
    mid = 0.5 * (frames[1:] + frames[:-1])
    if not all(is_regular(mc) for mc in mid):
        raise _Degenerate
    v = (frames[1:] - frames[:-1]) * K
    A = operator_array(mid, m, si)
    Gv = A @ v
    q = np.sum(Gv * v, axis=(-1, -2))
    dq = quadratic_gradient(mid, v, m, si)
    energy = float(np.sum(q)) / K
    grad = 2.0 * (Gv[:-1] - Gv[1:]) + (dq[:-1] + dq[1:]) / (2.0 * K)
    return energy, grad, (A, v, dq)


def path_energy_gradient(frames, spec) -> np.ndarray:
    """Gradient of the discrete path energy with respect to the interior frames."""
    spec = _spec(spec)
    frames = np.asarray(frames, dtype=float)
    try:
        _, grad, _ = _energy_and_gradient(frames[1:-1], frames[0], frames[-1],
                                          spec.m, spec.scale_invariant)
    except _Degenerate:
        raise DegenerateCurve("path leaves the space of regular polygons") from None
    return grad


@dataclass(frozen=True, eq=False)
class BvpResult:
    path: CurvePath
    initial_velocity: TangentField
    final_energy: float
    iterations: int
    restarts: int
    gradient_norm: float = float("nan")
    energy_history: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)


def _preconditioner(A, K):
    """Cholesky factor of the Gauss-Newton path-energy Hessian (per coordinate).

    Dropping the metric-variation terms, the Hessian in the interior frames is
    block tridiagonal with diagonal blocks ``2K (A_{t-1} + A_t)`` and
    off-diagonal blocks ``-2K A_t``, where ``A_t`` is the Gram matrix at the
    midpoint of interval ``t``.
    """
    T, n = A.shape[0] - 1, A.shape[-1]
    H = np.zeros((T * n, T * n))
    for t in range(T):
        H[t * n:(t + 1) * n, t * n:(t + 1) * n] = 2 * K * (A[t] + A[t + 1])
        if t + 1 < T:
            H[t * n:(t + 1) * n, (t + 1) * n:(t + 2) * n] = -2 * K * A[t + 1]
            H[(t + 1) * n:(t + 2) * n, t * n:(t + 1) * n] = -2 * K * A[t + 1]
    return np.linalg.cholesky(H)


def _apply_inverse(L, g):
    """``L^-1 g`` for interior-frame arrays ``g`` of shape ``(T, n, d)``."""
    T, n, d = g.shape
    return solve_triangular(L, g.reshape(T * n, d), lower=True).reshape(g.shape)


def _apply_inverse_transpose(L, z):
    T, n, d = z.shape
    return solve_triangular(L, z.reshape(T * n, d), lower=True, trans="T").reshape(z.shape)


def _fd_hessian(interior, c0, c1, m, si, h):
    """Central differences of the analytic energy gradient, symmetrised."""
    N = interior.size
    H = np.empty((N, N))
    flat = interior.ravel()
    for a in range(N):
        e = np.zeros(N)
        e[a] = h
        gp = _energy_and_gradient((flat + e).reshape(interior.shape), c0, c1, m, si)[1]
        gm = _energy_and_gradient((flat - e).reshape(interior.shape), c0, c1, m, si)[1]
        H[a] = (gp - gm).ravel() / (2 * h)
    return 0.5 * (H + H.T)


def _newton_polish(interior, c0, c1, m, si, gtol, scale, history, max_steps=8):
    """Drive the gradient below ``gtol`` once line searches stall at rounding level.

    Quasi-Newton methods stop when the energy no longer decreases in floating
    point, which can leave the gradient well above tolerance.  Newton steps on
    the gradient equation do not depend on resolving energy differences.
    A step is accepted only if it lowers the gradient norm.
    """
    energy, grad, _ = _energy_and_gradient(interior, c0, c1, m, si)
    gnorm = float(np.linalg.norm(grad))
    for _ in range(max_steps):
        if gnorm <= gtol:
            break
        H = _fd_hessian(interior, c0, c1, m, si, 1e-6 * scale)
        step = np.linalg.lstsq(H, grad.ravel(), rcond=None)[0].reshape(interior.shape)
        accepted = False
        for damping in (1.0, 0.5, 0.25, 0.125):
            trial = interior - damping * step
            try:
                e_t, g_t, _ = _energy_and_gradient(trial, c0, c1, m, si)
            except _Degenerate:
                continue
            gn_t = float(np.linalg.norm(g_t))
            if gn_t < gnorm:
                interior, energy, grad, gnorm = trial, e_t, g_t, gn_t
                history.append(energy)
                accepted = True
                break
        if not accepted:
            break
    return interior


def _initial_velocity(c0, A, v, dq, K, spec, how):
    if how == "forward":
        return v[0]
    if how != "legendre":
        raise ValueError(f"unknown velocity extraction {how!r}")
    # discrete Legendre transform at t=0: 2 G(c0) v0 = 2 G(mid_0) v_0 - dt/2 grad q(mid_0)
    A0 = operator_array(c0, spec.m, spec.scale_invariant)
    rhs = A[0] @ v[0] - dq[0] / (4.0 * K)
    return cho_solve(_factor(A0), rhs)


def log_map(c0: DiscreteCurve, c1: DiscreteCurve, spec, frames: int = 20, *,
            tol: float | None = None, max_iter: int = 2000, jitter: float = 1e-3,
            max_restarts: int = 5, rng=None, velocity: str = "legendre") -> BvpResult:
    """Geodesic between ``c0`` and ``c1`` by path straightening.

    The energy of a path with ``frames`` interior curves and fixed endpoints
    is minimised by L-BFGS-B starting from linear interpolation.  If the
    initial path or an iterate leaves the space of regular polygons, the
    initial interior frames are perturbed by uniform noise of size
    ``jitter * mean edge length`` and the solve restarts.  When the line
    search stalls at rounding level, a few Newton steps on the gradient
    (finite-difference Hessian) finish the job.

    Parameters
    ----------
    tol : float, optional
        Gradient-norm tolerance; default ``1e-8 * (1 + initial energy)``.
    rng : numpy.random.Generator or int, optional
        Source of the restart noise.
    velocity : {"legendre", "forward"}
        How the initial velocity is read off the discrete path.  The forward
        difference ``(frame_1 - frame_0) / dt`` is first-order accurate;
        ``"legendre"`` corrects it with the discrete momentum at ``t = 0``.

    Raises
    ------
    MaxIterations
        If the gradient norm does not reach ``tol``.
    InitializationFailed
        After ``max_restarts`` noisy restarts all failed.
    """
    spec = _spec(spec)
    if c0.vertices.shape != c1.vertices.shape:
        raise ValueError("endpoint curves must have the same n and d")
    if frames < 1:
        raise ValueError("need at least one interior frame")
    rng = np.random.default_rng(rng)
    x0, x1 = c0.vertices, c1.vertices
    K = frames + 1
    s = np.linspace(0.0, 1.0, K + 1)[1:-1, None, None]
    if np.array_equal(x0, x1):
        path = CurvePath(np.repeat(x0[None], K + 1, axis=0))
        return BvpResult(path=path, initial_velocity=TangentField(c0, np.zeros_like(x0)),
                         final_energy=0.0, iterations=0, restarts=0, gradient_norm=0.0,
                         energy_history=np.zeros(1))
    linear = x0 + s * (x1 - x0)
    scale = float(np.mean(c0.lengths))
    shape = linear.shape
    m, si = spec.m, spec.scale_invariant

    restarts = 0
    init = linear
    while True:
        try:
            e_init, _, (A_init, _, _) = _energy_and_gradient(init, x0, x1, m, si)
        except _Degenerate:
            e_init = None
        if e_init is not None:
            gtol = tol if tol is not None else 1e-8 * (1.0 + e_init)
            history = [e_init]
            chol = _preconditioner(A_init, K)
            base = init.copy()

            def to_frames(z):
                return base + _apply_inverse_transpose(chol, z.reshape(shape))

            def fun(z):
                e, g, _ = _energy_and_gradient(to_frames(z), x0, x1, m, si)
                return e, _apply_inverse(chol, g).ravel()

            def callback(intermediate_result):
                history.append(float(intermediate_result.fun))

            try:
                res = minimize(fun, np.zeros(init.size), jac=True, method="L-BFGS-B",
                               callback=callback,
                               options={"maxiter": max_iter, "gtol": 1e-3 * gtol,
                                        "ftol": 0.0, "maxcor": 20, "maxls": 50})
            except _Degenerate:
                res = None
            if res is not None:
                res.x = to_frames(res.x).ravel()
                break
        if restarts >= max_restarts:
            raise InitializationFailed(
                f"path left the space after {restarts} noisy restarts")
        restarts += 1
        log.info("log_map restart %d with jitter %.3g", restarts, jitter * scale)
        init = linear + rng.uniform(-1.0, 1.0, size=shape) * jitter * scale

    polish_budget = min(8, max(max_iter - int(res.nit), 0))
    n_before = len(history)
    interior = _newton_polish(res.x.reshape(shape), x0, x1, m, si, gtol, scale, history,
                              max_steps=polish_budget)
    iterations = int(res.nit) + len(history) - n_before
    energy, grad, (A, v, dq) = _energy_and_gradient(interior, x0, x1, m, si)
    gnorm = float(np.linalg.norm(grad))
    if gnorm > gtol:
        raise MaxIterations(
            f"gradient norm {gnorm:.3g} above tolerance {gtol:.3g} after {iterations} "
            f"iterations ({res.message})")
    v0 = _initial_velocity(x0, A, v, dq, K, spec, velocity)
    path = CurvePath(np.concatenate([x0[None], interior, x1[None]]))
    return BvpResult(path=path, initial_velocity=TangentField(c0, v0), final_energy=energy,
                     iterations=iterations, restarts=restarts, gradient_norm=gnorm,
                     energy_history=np.array(history))


def reparametrize_constant_speed(path: CurvePath, spec, frames: int | None = None) -> CurvePath:
    """Resample ``path`` piecewise linearly so consecutive frames are equally far apart."""
    spec = _spec(spec)
    speeds = geodesic_speed_profile(path, spec)
    arc = np.concatenate([[0.0], np.cumsum(speeds)])
    if arc[-1] == 0:
        return path
    arc /= arc[-1]
    T = path.steps if frames is None else frames
    target = np.linspace(0.0, 1.0, T + 1)
    idx = np.clip(np.searchsorted(arc, target, side="right") - 1, 0, path.steps - 1)
    w = ((target - arc[idx]) / np.maximum(arc[idx + 1] - arc[idx], 1e-300))[:, None, None]
    out = (1 - w) * path.frames[idx] + w * path.frames[idx + 1]
    return CurvePath(out)


def straight_path(c0: DiscreteCurve, c1: DiscreteCurve, steps: int) -> CurvePath:
    s = np.linspace(0.0, 1.0, steps + 1)[:, None, None]
    return CurvePath(c0.vertices + s * (c1.vertices - c0.vertices))


__all__ = [
    "BvpResult", "ChristoffelTensor", "angular_momentum", "christoffel", "exp_map",
    "geodesic_acceleration", "geodesic_speed_profile", "linear_momentum", "log_map",
    "make_curve", "metric_derivatives", "momentum", "path_energy_gradient",
    "quadratic_gradient", "reparametrize_constant_speed", "scaling_momentum", "straight_path",
]
