"""nearscat: near-field acoustic imaging of 2D impenetrable scatterers.

Reconstructs sound-soft/sound-hard obstacle or cavity boundaries from
point-source near-field data on a measurement circle: the scattered field
is continued toward the unknown boundary by truncated Fourier-Hankel /
Fourier-Bessel expansions, and the boundary shows up as the zero set of a
boundary-condition indicator evaluated on an imaging grid.  Ships its own
boundary-integral forward solver and an analytic circle oracle for data
synthesis and verification.
"""

from .continuation import (ModeCoefficients, compute_coefficients, eval_field,
                           eval_gradient, guard_interior_modes, truncation_order)
from .forward import (DensitySolution, RingMeasurement, SourceSet, analytic_circle,
                      incident_field, incident_gradient, simulate_ring,
                      solve_densities, solve_forward)
from .geometry import (BoundaryCurve, ImagingGrid, ShapeSpec, imaging_grid,
                       make_curve, min_distance)
from .indicator import (IndicatorImage, indicator_hard, indicator_soft, normalize,
                        reciprocal, select_reference_source,
                        superpose_multifrequency)
from .noise import NoiseSpec, add_noise
from .pipeline import (RateReport, RayReport, ScenarioConfig, convergence_study,
                       radial_boundary_error, render_pgm, run_scenario)

__version__ = "0.1.0"

__all__ = [
    "BoundaryCurve", "DensitySolution", "ImagingGrid", "IndicatorImage",
    "ModeCoefficients", "NoiseSpec", "RateReport", "RayReport", "RingMeasurement",
    "ScenarioConfig", "ShapeSpec", "SourceSet", "add_noise", "analytic_circle",
    "compute_coefficients", "convergence_study", "eval_field", "eval_gradient",
    "guard_interior_modes", "imaging_grid", "incident_field", "incident_gradient",
    "indicator_hard", "indicator_soft", "make_curve", "min_distance", "normalize",
    "radial_boundary_error", "reciprocal", "render_pgm", "run_scenario",
    "select_reference_source", "simulate_ring", "solve_densities", "solve_forward",
    "superpose_multifrequency", "truncation_order",
]
