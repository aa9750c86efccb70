"""Discrete Sobolev geometry on spaces of closed polygons."""
from .errors import *  # noqa: F401,F403
from .curves import (CurvePath, DerivedField, DiscreteCurve, TangentField, as_field,
                     cyclic_shift, discrete_derivative, make_curve, random_rotation,
                     regular_polygon, rotation_2d, similarity_transform, unit_square)
from .metric import (MetricMatrix, MetricSpec, Variant, gm_dot, gm_inner, gm_norm,
                     lipschitz_witness, metric_matrix, path_energy, path_length)
from .geodesics import (BvpResult, christoffel, exp_map, geodesic_speed_profile, log_map,
                        metric_derivatives, reparametrize_constant_speed, straight_path)
from .shapes import (CurvatureGrid, curvature_grid, gaussian_curvature, kendall_distance,
                     quotient_metric, symlog)
from .convergence import (DegenerationFamily, SmoothCurveSpec, completeness_probe,
                          convergence_table, named_spec, smooth_metric_oracle)
from .io import render_svg

__version__ = "0.1.0"
