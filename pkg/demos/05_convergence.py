"""Discrete metrics converge to the smooth one; low orders are incomplete."""
import numpy as np

from polygeo import DegenerationFamily, MetricSpec, completeness_probe, convergence_table
from polygeo.convergence import circle, limacon_spec, linear_fit

print("circle with the constant field (1, 0), order 1")
print(f"  {'n':>4} {'discrete':>14} {'error':>11} {'order':>7}")
for r in convergence_table(circle("constant"), 1, n_list=(10, 20, 40, 80)):
    print(f"  {r.n:>4} {r.discrete_value:>14.10f} {r.abs_error:>11.3e} {r.empirical_order:>7.3f}")

print("\nlimacon, order 2")
for r in convergence_table(limacon_spec(), 2, n_list=(16, 32, 64, 128, 256)):
    print(f"  {r.n:>4} {r.discrete_value:>14.10f} {r.abs_error:>11.3e} {r.empirical_order:>7.3f}")

# Collapse one edge of the unit square to length 2^-k and measure how far that is.
ks = np.arange(2, 11)
eps = [2.0 ** -k for k in ks]
for kind, m in (("edge-collapse", 2), ("edge-collapse", 0), ("global-shrink", 2)):
    L = np.array([length for _, length in
                  completeness_probe(DegenerationFamily(kind), MetricSpec(m), eps)])
    slope, _, r2 = linear_fit(ks, L)
    tail = np.diff(L)
    print(f"\n{kind}, order {m}: L = {np.array2string(L, precision=4)}")
    print(f"  linear fit in k: slope {slope:.3f}, R^2 {r2:.6f};"
          f" last increments ratio {tail[-1] / tail[-2]:.3f}")
