"""Tridiagonal representation of the rank-one (C1v, C1) double affine Hecke
algebra and the orthogonal polynomials it carries: on the unit circle, on the
interval, Askey-Wilson, AW(3) and finite truncations."""

__version__ = "0.1.0"

from .errors import (DahaError, DegeneracyError, DomainError, ForbiddenConditionError, PositivityError,
                     RankError, SingularityError, StructureError, TruncationError, WindowError)
from .params import ParameterSet, derive_parameters, free_parameters, load_parameters
from .rep import (BandedOperator, build_reflection, build_T, coeff_a, coeff_alpha, rep_coefficients,
                  verify_derivation_system, verify_product_relation)
from .opuc import VerblunskySource, build_cmv, laurent_basis, pencil_residual, szego_polynomial
from .interval import ThreeTermRecurrence, family_recurrence, spectral_measure
from .askey_wilson import AWParameters, aw_monic, aw_spectrum, phi43, verify_circle_identity
from .aw3 import build_xy, casimir, central_extension_residual, fit_structure_constants, split_sectors
from .truncation import (TruncationCondition, build_finite_lm, finite_orthogonality, finite_spectrum,
                         solve_truncation)
