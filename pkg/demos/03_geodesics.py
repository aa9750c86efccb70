"""Shooting geodesics, connecting curves and rendering filmstrips."""
import numpy as np

from _common import output_dir
from polygeo import (exp_map, geodesic_speed_profile, gm_norm, log_map, make_curve,
                     path_energy, path_length, render_svg, straight_path)

out = output_dir()

# A kick on one vertex of a right triangle immediately drags the others along.
tri = make_curve([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]])
kick = np.zeros((3, 2))
kick[2] = [0.0, 1.0]
path = exp_map(tri, kick, 2, steps=100)
moved = np.linalg.norm(path.frames[2, :2] - tri.vertices[:2], axis=1)
print("displacement of vertices 0 and 1 after two steps:", moved)
speeds = geodesic_speed_profile(path, 2)
print(f"speed along the geodesic: {speeds.min():.10f} .. {speeds.max():.10f}")
(out / "kick.svg").write_text(render_svg(path.frames[::20]))

# Recover the kick from the endpoints with path straightening.
rng = np.random.default_rng(1)
c0 = make_curve([[0.0, 0.0], [1.0, 0.1], [0.4, 0.8], [-0.1, 0.6]])
v = rng.standard_normal((4, 2))
v *= 0.1 / gm_norm(c0, v, 2)
c1 = make_curve(exp_map(c0, v, 2, steps=200).frames[-1])
res = log_map(c0, c1, 2, frames=20)
err = np.linalg.norm(res.initial_velocity.components - v) / np.linalg.norm(v)
print(f"\nlog map: {res.iterations} iterations, energy {res.final_energy:.6g}, "
      f"velocity recovered to relative error {err:.2e}")
print("energy history:", np.array2string(res.energy_history, precision=8))
line = straight_path(c0, c1, 21)
print(f"straight line energy {path_energy(line, 2):.8g} vs geodesic {res.final_energy:.8g}")
print(f"geodesic length {path_length(res.path, 2):.8g}")
(out / "geodesic.svg").write_text(render_svg(res.path.frames[::4]))
print(f"filmstrips written to {out}/kick.svg and {out}/geodesic.svg")
