"""Numerical laboratory for weighted-boundary inequalities of convex
bodies: support-function geometry, weighted measures, boundary spectra,
radial interior identities, the parallel normal flow, and
Brunn-Minkowski-type concavity profiles."""

from .bodies import (SupportBody, DirectionGrid, angle_grid, icosphere,
                     disc, ellipse, ball, ellipsoid, random_body_2d,
                     random_body_3d, make_body, minkowski_sum_support,
                     mixed_area, euclidean_size)
from .measures import (Density, lebesgue, gaussian, cauchy, polynomial,
                       density_from_spec, weighted_measures,
                       quermassintegrals, cd_check, gamma2_check,
                       boundary_cd, check_invN)
from .boundary import (BoundaryOperator, spectral_gap, colesanti_verify,
                       colesanti_strengthened, dual_colesanti_verify,
                       mean_curvature_inequalities, bound_suite)
from .radial import (RadialProblem, solve_mode, reilly_terms,
                     reilly_residual, colesanti_proof_chain,
                     ros_proof_chain)
from .flow import (FlowTrace, pnf_integrate, parallel_normal_diagnostic,
                   flow_vs_support_sum, ma_diagnostics, map_T, wave_flow)
from .profiles import (ConcavityProfile, concavity_profile,
                       minkowski_second, isoperimetric_checks,
                       euclidean_quadratic_slack)
from .report import VerdictReport, write_verdicts_csv

__version__ = "0.1.0"
