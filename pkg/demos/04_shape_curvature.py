"""Curvature of the space of triangle shapes under quotient metrics."""
import numpy as np

from _common import output_dir
from polygeo import curvature_grid, gaussian_curvature, kendall_distance, quotient_metric
from polygeo import io as pio
from polygeo.shapes import EQUILATERAL, chart_triangle, ring_points

out = output_dir()

# A triangle with vertices (0,0), (1,0), (x,y) represents every similar triangle.
print("quotient metric at (0.3, 0.4):")
for name in ("kendall", "g0", "g1", "g2"):
    q = quotient_metric(0.3, 0.4, name)
    print(f"  {name:<7} E={q.E:.6g}  F={q.F:.2g}  G={q.G:.6g}")

print("\nGaussian curvature")
print(f"  {'metric':<8}{'equilateral':>14}{'ring min':>14}{'ring max':>14}")
for name in ("kendall", "g0", "g1", "g2"):
    ring = [gaussian_curvature(x, y, name) for p in ((0, 0), (1, 0))
            for x, y in ring_points(p, 0.05)]
    print(f"  {name:<8}{gaussian_curvature(*EQUILATERAL, name):>14.6g}"
          f"{min(ring):>14.6g}{max(ring):>14.6g}")

eq = chart_triangle(*EQUILATERAL)
print("\nKendall distance from the equilateral triangle to its mirror image:",
      kendall_distance(eq, eq * [1, -1]))

for name in ("kendall", "g2"):
    grid = curvature_grid((-1.0, 2.0, 0.02, 1.8), (31, 18), name, transform="symlog")
    (out / f"curvature_{name}.csv").write_text(pio.grid_csv(grid))
    (out / f"curvature_{name}.svg").write_text(pio.render_svg(grid))
    vals = grid.values[np.isfinite(grid.values)]
    print(f"{name}: K over the grid in [{vals.min():.4g}, {vals.max():.4g}]"
          f" -> {out}/curvature_{name}.svg")
