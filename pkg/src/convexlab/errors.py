"""Exception types shared across the package.

Verification routines distinguish hard precondition violations (raised)
from hypothesis failures that are reported as flagged, skipped verdict
rows (see report.VerdictReport.flag).
"""


class ConvexLabError(Exception):
    """Base class for all package errors."""


class NonConvexError(ConvexLabError):
    """Reverse Weingarten form is not positive-definite within the margin."""


class NonPositiveError(ConvexLabError):
    """Support function is not strictly positive (origin not interior)."""


class GridMismatchError(ConvexLabError):
    """Two bodies do not share a direction grid."""


class DimensionError(ConvexLabError):
    """Operation not defined for the dimension of the input."""


class ConventionViolationError(ConvexLabError):
    """Parameter combination outside the documented 1/N conventions."""


class QuadratureFailureError(ConvexLabError):
    """Non-finite values encountered during quadrature."""


class SolverFailureError(ConvexLabError):
    """Linear / eigenvalue solver did not reach its tolerance."""


class IncompatibleDataError(ConvexLabError):
    """Neumann compatibility condition violated for the k=0 mode."""


class VariantMismatchError(ConvexLabError):
    """Identity variant requested for a solution outside its hypotheses."""


class NonMeanConvexError(ConvexLabError):
    """Generalized mean curvature is not strictly positive."""


class ContainmentViolatedError(ConvexLabError):
    """Support dominance h_K <= h_Omega fails."""


class DiameterCertificateError(ConvexLabError):
    """No finite D certifies Omega - Omega inside D*L."""


class GaussMapInversionError(ConvexLabError):
    """Inverse Gauss map query could not be bracketed on the grid."""


class SparseCoverageError(ConvexLabError):
    """Too few trace samples to reconstruct the swept field."""
