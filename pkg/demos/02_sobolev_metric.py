"""Evaluating discrete Sobolev metrics and checking their symmetries."""
import numpy as np

from polygeo import (MetricSpec, Variant, gm_dot, gm_inner, make_curve, metric_matrix,
                     random_rotation, similarity_transform, unit_square)

square = unit_square()
const = np.tile([1.0, 0.0], (4, 1))
ident = square.vertices

print("hand-checkable values on the unit square")
print("  L2 term of the constant field   ", gm_dot(square, const, const, 0))
print("  order-1 term of the identity    ", gm_dot(square, ident, ident, 1))
print("  order-2 term of the identity    ", gm_dot(square, ident, ident, 2))
print("  full g^1 of the identity        ", gm_inner(square, ident, ident, 1))

rng = np.random.default_rng(0)
x = rng.standard_normal((7, 3))
c = make_curve(x)
h = rng.standard_normal((7, 3))
spec = MetricSpec(2)
base = gm_inner(c, h, h, spec)
R = random_rotation(3, rng)
print(f"\ng^2(h, h) on a random space heptagon: {base:.12g}")
print(f"  after rotating curve and field   : {gm_inner(make_curve(x @ R.T), h @ R.T, h @ R.T, spec):.12g}")
print(f"  after scaling both by 3          : {gm_inner(make_curve(3 * x), 3 * h, 3 * h, spec):.12g}")
cc = MetricSpec(2, Variant.CONSTANT_COEFFICIENT)
print(f"  constant-coefficient variant, x1 : {gm_inner(c, h, h, cc):.6g}")
print(f"  constant-coefficient variant, x3 : {gm_inner(make_curve(3 * x), 3 * h, 3 * h, cc):.6g}")

# Higher orders dominate lower ones: gdot^m <= gdot^(m+1) / 4.
for m in (1, 2, 3):
    lo, hi = gm_dot(c, h, h, m), gm_dot(c, h, h, m + 1)
    print(f"  gdot^{m} = {lo:10.4g}  <=  gdot^{m + 1} / 4 = {hi / 4:10.4g}")

G = metric_matrix(c, spec)
eig = np.linalg.eigvalsh(G.entries)
print(f"\nmetric tensor is {G.entries.shape[0]}x{G.entries.shape[0]}, "
      f"eigenvalues in [{eig.min():.3g}, {eig.max():.3g}]")
print("scaled square, field 2c:", gm_inner(similarity_transform(square, 2.0), 2 * ident,
                                           2 * ident, 1))
