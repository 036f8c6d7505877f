"""Laurent expansions of inverses of analytic matrix functions.

The sequential engine peels off one Fredholm quotient per order of the pole,
the closed-form engine evaluates explicit coefficient formulas on the same
projectors, and a contour-integral oracle checks both.  An AR layer applies
the expansion at ``z = 1`` to build Granger-Johansen representations.
"""
from .ar import ARModel, GrangerReport, check_unit_root_config, granger_decomposition, reexpand_at_one
from .closed_form import closed_form_inverse, verify_annihilation, verify_nesting
from .conditions import IdConditionReport, check_conditions
from .errors import (BudgetError, FredresError, NumericError, ParseError, PoleOrderExceededError,
                     SeriesMismatchError, SingularLeadingCoefficientError, SingularSampleError,
                     UnitRootConfigError)
from .oracle import OracleConfig, contour_coefficients, cross_validate, estimate_pole_order
from .quotient import QuotientChain, factorize, invert, laurent_inverse_sequential
from .series import LaurentExpansion, LaurentSeries, TaylorSeries, evaluate

__version__ = "0.1.0"

__all__ = [
    "ARModel", "BudgetError", "FredresError", "GrangerReport", "IdConditionReport",
    "LaurentExpansion", "LaurentSeries", "NumericError", "OracleConfig", "ParseError",
    "PoleOrderExceededError", "QuotientChain", "SeriesMismatchError",
    "SingularLeadingCoefficientError", "SingularSampleError", "TaylorSeries", "UnitRootConfigError",
    "check_conditions", "check_unit_root_config", "closed_form_inverse", "contour_coefficients",
    "cross_validate", "estimate_pole_order", "evaluate", "factorize", "granger_decomposition",
    "invert", "laurent_inverse_sequential", "reexpand_at_one", "verify_annihilation",
    "verify_nesting",
]
