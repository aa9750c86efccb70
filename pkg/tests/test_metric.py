import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polygeo import (MetricSpec, NotPositiveDefinite, Variant, cyclic_shift, gm_dot, gm_inner,
                     gm_norm, lipschitz_witness, make_curve, metric_matrix, path_energy,
                     path_length, random_rotation, similarity_transform, unit_square)
from polygeo.curves import CurvePath, shift_field
from polygeo.metric import metric_matrix_columns, operator_array

from conftest import random_curve, rel_err

SI, CC = Variant.SCALE_INVARIANT, Variant.CONSTANT_COEFFICIENT

instances = st.tuples(st.integers(0, 2**32 - 1), st.integers(3, 12), st.sampled_from([2, 3]),
                      st.integers(0, 3), st.sampled_from([SI, CC]))


def _setup(inst):
    seed, n, d, m, variant = inst
    rng = np.random.default_rng(seed)
    c = random_curve(rng, n, d)
    h, k = rng.standard_normal((2, n, d))
    return rng, c, h, k, MetricSpec(m, variant)


# hand-evaluated values on the unit square

def test_square_constant_field_m1():
    c = unit_square()
    h = np.tile([1.0, 0.0], (4, 1))
    assert gm_dot(c, h, h, 1) == 0.0
    assert gm_dot(c, h, h, 0) == 0.0625
    assert gm_inner(c, h, h, 1) == 0.0625


def test_square_identity_field():
    c = unit_square()
    assert gm_dot(c, c.vertices, c.vertices, 1) == pytest.approx(1.0, rel=1e-15)
    assert gm_dot(c, c.vertices, c.vertices, 2) == pytest.approx(32.0, rel=1e-15)
    assert gm_inner(c, c.vertices, c.vertices, 1) == pytest.approx(1.0625, rel=1e-15)


def test_scaled_square():
    c = similarity_transform(unit_square(), 2.0)
    assert gm_inner(c, c.vertices, c.vertices, 1) == pytest.approx(1.0625, rel=1e-14)


def test_m0_is_twice_l2_term(rng):
    c = random_curve(rng, 6)
    h = rng.standard_normal((6, 2))
    assert gm_inner(c, h, h, 0) == pytest.approx(2 * gm_dot(c, h, h, 0), rel=1e-15)


def test_metric_spec_validation():
    with pytest.raises(ValueError):
        MetricSpec(-1)
    with pytest.raises(ValueError):
        MetricSpec(1.5)
    with pytest.raises(ValueError):
        MetricSpec(1, "sideways")
    assert MetricSpec.from_dict(MetricSpec(3, CC).to_dict()) == MetricSpec(3, CC)


def test_field_shape_checked():
    with pytest.raises(ValueError):
        gm_inner(unit_square(), np.zeros((3, 2)), np.zeros((4, 2)), 1)


# metric tensor

def test_square_quadratic_form():
    c = unit_square()
    assert metric_matrix(c, 1).quadratic(c.vertices) == pytest.approx(1.0625, rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(instances)
def test_tensor_matches_inner(inst):
    rng, c, h, _, spec = _setup(inst)
    G = metric_matrix(c, spec)
    for _ in range(20):
        k = rng.standard_normal(h.shape)
        assert G.quadratic(h, k) == pytest.approx(gm_inner(c, h, k, spec), rel=1e-10, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(instances)
def test_tensor_symmetric_and_spd(inst):
    _, c, _, _, spec = _setup(inst)
    G = metric_matrix(c, spec).entries
    assert np.array_equal(G, G.T)
    assert np.min(np.linalg.eigvalsh(G)) > 0


@settings(max_examples=25, deadline=None)
@given(instances)
def test_column_assembly_agrees(inst):
    _, c, _, _, spec = _setup(inst)
    G = metric_matrix(c, spec).entries
    assert rel_err(metric_matrix_columns(c, spec), G) <= 1e-12


def test_solve_inverts(rng):
    c = random_curve(rng, 5, 3)
    G = metric_matrix(c, 2)
    r = rng.standard_normal((5, 3))
    assert np.allclose(G.entries @ G.solve(r).ravel(), r.ravel(), rtol=1e-10, atol=1e-10)


def test_not_positive_definite_reported(rng):
    from polygeo.metric import MetricMatrix
    c = random_curve(rng, 3)
    bad = MetricMatrix(c, MetricSpec(1), -np.eye(6))
    with pytest.raises(NotPositiveDefinite):
        bad.factor


# invariances

@settings(max_examples=80, deadline=None)
@given(instances, st.integers(-30, 30))
def test_cyclic_shift_invariance(inst, j):
    _, c, h, k, spec = _setup(inst)
    lhs = gm_inner(cyclic_shift(c, j), shift_field(h, j), shift_field(k, j), spec)
    assert lhs == pytest.approx(gm_inner(c, h, k, spec), rel=1e-12, abs=1e-300)


@settings(max_examples=80, deadline=None)
@given(instances)
def test_euclidean_invariance(inst):
    rng, c, h, k, spec = _setup(inst)
    R = random_rotation(c.d, rng)
    moved = similarity_transform(c, 1.0, R, rng.standard_normal(c.d) * 3)
    lhs = gm_inner(moved, h @ R.T, k @ R.T, spec)
    ref = gm_inner(c, h, k, spec)
    scale = abs(gm_inner(c, h, h, spec) * gm_inner(c, k, k, spec)) ** 0.5
    assert abs(lhs - ref) <= 1e-12 * scale


@settings(max_examples=80, deadline=None)
@given(instances, st.floats(0.1, 10.0))
def test_scale_invariance(inst, lam):
    _, c, h, k, spec = _setup(inst)
    spec = MetricSpec(spec.m, SI)
    lhs = gm_inner(similarity_transform(c, lam), lam * h, lam * k, spec)
    ref = gm_inner(c, h, k, spec)
    scale = abs(gm_inner(c, h, h, spec) * gm_inner(c, k, k, spec)) ** 0.5
    assert abs(lhs - ref) <= 1e-12 * scale


def test_constant_coefficient_not_scale_invariant(rng):
    c = random_curve(rng, 5)
    h = rng.standard_normal((5, 2))
    spec = MetricSpec(2, CC)
    ratio = gm_inner(similarity_transform(c, 2.0), 2 * h, 2 * h, spec) / gm_inner(c, h, h, spec)
    assert abs(ratio - 1) > 0.01


# bilinear form

@settings(max_examples=60, deadline=None)
@given(instances, st.floats(-5, 5), st.floats(-5, 5))
def test_bilinear_symmetric(inst, a, b):
    rng, c, h, k, spec = _setup(inst)
    w = rng.standard_normal(h.shape)
    assert gm_inner(c, h, k, spec) == pytest.approx(gm_inner(c, k, h, spec), rel=1e-13, abs=1e-14)
    lhs = gm_inner(c, a * h + b * w, k, spec)
    rhs = a * gm_inner(c, h, k, spec) + b * gm_inner(c, w, k, spec)
    scale = (abs(a) + abs(b) + 1) * (gm_norm(c, h, spec) + gm_norm(c, w, spec)) * gm_norm(c, k, spec)
    assert abs(lhs - rhs) <= 1e-12 * scale


@settings(max_examples=60, deadline=None)
@given(instances)
def test_non_degenerate(inst):
    _, c, h, _, spec = _setup(inst)
    assert gm_inner(c, h, h, spec) > 0
    assert gm_inner(c, np.zeros_like(h), np.zeros_like(h), spec) == 0


# domination

@settings(max_examples=200, deadline=None)
@given(instances, st.integers(1, 3))
def test_domination(inst, m):
    _, c, h, _, _ = _setup(inst)
    lo, hi = gm_dot(c, h, h, MetricSpec(m)), gm_dot(c, h, h, MetricSpec(m + 1))
    assert lo <= 0.25 * hi * (1 + 1e-12)
    lo, hi = gm_dot(c, h, h, MetricSpec(m, CC)), gm_dot(c, h, h, MetricSpec(m + 1, CC))
    assert lo <= c.length ** 2 / 4 * hi * (1 + 1e-12)


@settings(max_examples=60, deadline=None)
@given(instances, st.lists(st.floats(0, 10), min_size=3, max_size=3))
def test_weighted_intermediate_terms_dominated(inst, weights):
    """Intermediate orders are controlled by the top order, so weighted sums are equivalent."""
    _, c, h, _, _ = _setup(inst)
    top = 4
    L2 = c.length ** 2 / 4
    dots = [gm_dot(c, h, h, MetricSpec(j, CC)) for j in range(1, top + 1)]
    weighted = sum(a * dots[j] for j, a in enumerate(weights))
    bound = sum(a * L2 ** (top - 1 - j) for j, a in enumerate(weights)) * dots[-1]
    assert weighted <= bound * (1 + 1e-12) + 1e-300


def test_domination_circle_every_n():
    from polygeo.convergence import circle, sample_curve
    for n in (8, 16, 32, 64, 128):
        c, h, _ = sample_curve(circle("identity"), n)
        assert gm_dot(c, h, h, 1) <= 0.25 * gm_dot(c, h, h, 2)


# path functionals

def test_constant_path():
    sq = unit_square().vertices
    p = CurvePath(np.stack([sq] * 5))
    assert path_length(p, 2) == 0.0 and path_energy(p, 2) == 0.0


@pytest.mark.parametrize("m", [1, 2, 3])
def test_translation_path_length(m):
    sq = unit_square().vertices
    t = np.linspace(0, 1, 9)[:, None, None]
    p = CurvePath(sq + t * np.array([1.0, 0.0]))
    # only the L2 term sees a translation: sqrt(4 / 4**3)
    assert path_length(p, m) == pytest.approx(0.25, rel=1e-14)
    assert path_energy(p, m) == pytest.approx(0.0625, rel=1e-14)


def test_cauchy_schwarz(rng):
    frames = np.stack([random_curve(rng, 5).vertices for _ in range(6)])
    p = CurvePath(frames)
    assert path_length(p, 2) ** 2 <= path_energy(p, 2)


# Lipschitz bound for sqrt(length)

def test_lipschitz_examples():
    c = unit_square()
    assert lipschitz_witness(c, np.tile([1.0, 0.0], (4, 1)))[0] == 0.0
    assert lipschitz_witness(c, c.vertices)[0] == pytest.approx(1.0, rel=1e-15)


def test_lipschitz_property():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(3, 12))
        c = make_curve(rng.standard_normal((n, 2)))
        first, second = lipschitz_witness(c, rng.standard_normal((n, 2)))
        assert first <= second * (1 + 1e-12)


def test_operator_batched(rng):
    xs = np.stack([random_curve(rng, 5).vertices for _ in range(3)])
    A = operator_array(xs, 2)
    for b in range(3):
        assert np.array_equal(A[b], operator_array(xs[b], 2))
