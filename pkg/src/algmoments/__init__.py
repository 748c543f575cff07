"""Recover algebraic boundaries and exponential weights from power moments."""
from .core import (Basis, DensePolynomial, compose_affine, enumerate_basis, euler_weighted_sum, eval_poly,
                   homogeneous_part, quadratic_form, translate)
from .determinateness import (ExtensionResult, euler_identity_check, extend_moments, extend_moments_expdensity,
                              extend_moments_expglobal, stokes_residual)
from .errors import (DegenerateSystemError, MissingMomentError, MomentError, NotInConeError, QuadratureError,
                     RecoveryError, SingularMatrixError, UnboundedRegionError)
from .matrices import (DiagonalFactors, MomentMatrix, assemble_coordinate, assemble_expdensity, assemble_expglobal,
                       assemble_plain, assemble_renorm, diagonal_factors, theta_matrix)
from .momentgen import gaussian_moments_oracle, moments_exp_density, moments_exp_global, moments_indicator
from .recovery import (RecoveryReport, approx_boundary, boundary_fit, kernel_solve, recover_boundary, recover_convex,
                       recover_exp_weight, recover_expdensity_boundary, recover_min_order, recover_singular)
from .regions import RegionSpec
from .sequence import MomentSequence, affine_pushforward, translate_moments

__version__ = "0.1.0"
