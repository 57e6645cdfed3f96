"""
Time-domain acoustic scattering in two dimensions by frequency-domain solves.

The scattered field of a Gaussian packet hitting a sound-soft obstacle is
built from boundary-integral solves at complex frequencies omega + i delta,
a sinc expansion in time, and contour corrections that undo the damping.
"""

from .contour import (ContourSpec, CorrectionRule, contour_assemble, correction_node_count,
                      correction_rule, correction_term, default_delta, delta_limit)
from .geometry import (GALLERY, BoundaryCurve, DiscretizedBoundary, GeometryError, build_scatterer,
                       classify_points, contains, discretize, distance_to_boundary)
from .helmholtz import (ComplexFrequency, Density, FieldEvaluator, OperatorMatrix, assemble_cfie,
                        disk_series_reference, evaluate_field, plane_wave, point_source, solve_density)
from .incident import Band, WavePacket, min_delay, packet_transform, packet_value, select_band
from .pipeline import (GridSpec, ScattererSpec, SimConfig, SolutionSet, run_simulation,
                       verify_assembly)
from .specfun import hankel01
from .synthesis import (FrequencyField, SincExpansion, adaptive_m, coeffs_from_samples,
                        gl_rule, gl_synthesis, sinc_synthesize, time_oracle)

__version__ = "0.1.0"
