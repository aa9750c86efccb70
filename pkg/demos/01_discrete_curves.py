"""Closed polygons, edge weights and discrete arc-length derivatives."""
import numpy as np

from polygeo import (DegenerateCurve, cyclic_shift, discrete_derivative, make_curve,
                     regular_polygon, rotation_2d, similarity_transform, unit_square)

square = unit_square()
print("unit square")
print("  edge lengths  ", square.lengths)
print("  vertex weights", square.mu)
print("  total length  ", square.length)

# A regular n-gon inscribed in the unit circle has length 2 n sin(pi / n).
for n in (6, 10, 50):
    print(f"regular {n:>2}-gon length {regular_polygon(n).length:.7f}"
          f"  (closed form {2 * n * np.sin(np.pi / n):.7f})")

# Odd derivatives live on edges, even ones on vertices.  Differentiating the
# identity field of the square once gives the unit tangents, twice gives the
# turning vectors e_i - e_{i-1}.
for j in (1, 2):
    d = discrete_derivative(square, square.vertices, j)
    print(f"D_s^{j} of the identity field ({d.parity}-based):")
    print(np.array2string(d.values, prefix="  "))

# Relabelling and similarity transforms.
print("shifted by one :", cyclic_shift(square, 1).vertices.tolist())
turned = similarity_transform(square, R=rotation_2d(np.pi / 2))
print("rotated by 90° :", np.round(turned.vertices, 12).tolist())
print("scaled by 2    : length", similarity_transform(square, 2.0).length)

try:
    make_curve([[0, 0], [0, 0], [1, 0]])
except DegenerateCurve as exc:
    print("coincident vertices are rejected:", exc)
