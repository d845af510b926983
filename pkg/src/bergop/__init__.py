"""Numerical toolkit for generalized weighted composition operators
``D^n_{phi,u} f = u * f^{(n)} o phi`` between weighted Bergman spaces.

Set ``BERGOP_NO_NUMBA=1`` to force the pure-numpy kernels.
"""

from .criteria import (CriterionResult, boundedness_criterion, carleson_criterion, compact_probe,
                       equivalence_gap, essential_norm_estimate, order_bounded_criterion)
from .errors import (BergopError, ConfigError, DivergentIntegralError, NodeEvaluationError, PreconditionError,
                     QuadratureError, SelfMapError, UnsupportedRegimeError)
from .functions import (Taylor, TestFunction, bergman_norm, choose_delta, growth_ratio,
                        make_test_function)
from .geometry import Region, pseudo_distance
from .operators import HoloMap, OperatorSymbol, PullbackMeasure, apply, image_norm
from .quadrature import IntegralOutcome, QuadratureSpec, integrate_disk, integrate_region
from .truncation import kernel_partial_sum, kernel_tail, remainder_sup_check, truncate
from .weights import RadialWeight, doubling_report

__all__ = [
    "BergopError", "ConfigError", "CriterionResult", "DivergentIntegralError", "HoloMap",
    "IntegralOutcome", "NodeEvaluationError", "OperatorSymbol", "PreconditionError", "PullbackMeasure",
    "QuadratureError", "QuadratureSpec", "RadialWeight", "Region", "SelfMapError", "Taylor",
    "TestFunction", "UnsupportedRegimeError", "apply", "bergman_norm", "boundedness_criterion",
    "carleson_criterion", "choose_delta", "compact_probe", "doubling_report", "equivalence_gap",
    "essential_norm_estimate", "growth_ratio", "image_norm", "integrate_disk", "integrate_region",
    "kernel_partial_sum", "kernel_tail", "make_test_function", "order_bounded_criterion",
    "pseudo_distance", "remainder_sup_check", "truncate",
]

__version__ = "0.1.0"
