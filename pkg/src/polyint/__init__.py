"""Section volumes of convex bodies and polynomial integrability diagnostics."""

__version__ = "0.1.0"

from .axial import axial_verdict, growth_exponent, limit_constant, omega_area
from .bodies import (ConvexBody, EllipsoidParams, RevolutionProfile, body_from_dict, body_to_dict,
                     boundary_patch, contains, dilate, make_ball, make_ellipsoid, make_revolution,
                     make_superellipsoid, numerical_support, support, support_points, transform)
from .exceptions import (AccuracyWarning, ConstructionError, DegenerateInputError, DomainError,
                         HypothesisError, InputError, PolyIntError, RecoveryError)
from .phase import (PhaseExpansion, eval_expansion, finiteness_check, inverse_expansion,
                    phase_expansion)
from .polyfit import (CoefficientField, PolyFit, SectionPolynomialFit, coefficient_field,
                      endpoint_exponent, endpoint_vanishing, fit_polynomial, fit_polynomials,
                      moment_orthogonality, parity_check)
from .recovery import EllipsoidRecovery, recover_ellipsoid
from .sections import (SectionCurve, back_project, ellipsoid_closed_form, fourier_chi,
                       section_curve, section_curves, section_volume)
from .spherical import direction_grid, fibonacci_sphere

__all__ = [
    "AccuracyWarning", "CoefficientField", "ConstructionError", "ConvexBody", "DegenerateInputError",
    "DomainError", "EllipsoidParams", "EllipsoidRecovery", "HypothesisError", "InputError",
    "PhaseExpansion", "PolyFit", "PolyIntError", "RecoveryError", "RevolutionProfile", "SectionCurve",
    "SectionPolynomialFit", "axial_verdict", "back_project", "body_from_dict", "body_to_dict",
    "boundary_patch", "coefficient_field", "contains", "dilate", "direction_grid", "ellipsoid_closed_form",
    "endpoint_exponent", "endpoint_vanishing", "eval_expansion", "fibonacci_sphere", "finiteness_check",
    "fit_polynomial", "fit_polynomials", "fourier_chi", "growth_exponent", "inverse_expansion",
    "limit_constant", "make_ball", "make_ellipsoid", "make_revolution", "make_superellipsoid",
    "moment_orthogonality", "numerical_support", "omega_area", "parity_check", "phase_expansion",
    "recover_ellipsoid", "section_curve", "section_curves", "section_volume", "support",
    "support_points", "transform",
]
