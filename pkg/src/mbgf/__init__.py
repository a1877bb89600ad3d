"""Balanced multiobjective gradient flows.

Minimum-norm hull projections, scaled gradient flows (first order and
accelerated), the discrete balanced gradient method, merit-function
estimates, and convergence-rate verification suites.
"""

__version__ = "0.1.0"

from .errors import (
    MBGFError,
    InvalidInputError,
    NoConvergenceError,
    DegenerateScalingError,
    NumericDomainError,
    DivergenceError,
    GridBudgetError,
    ConfigError,
)
from .geometry import (
    SimplexWeights,
    HullProjection,
    min_norm_point,
    project_onto_hull,
    support_point,
    hausdorff_hull_distance,
    certificate_violation,
    certificate_tolerance,
)

__all__ = [
    "MBGFError", "InvalidInputError", "NoConvergenceError",
    "DegenerateScalingError", "NumericDomainError", "DivergenceError",
    "GridBudgetError", "ConfigError",
    "SimplexWeights", "HullProjection", "min_norm_point",
    "project_onto_hull", "support_point", "hausdorff_hull_distance",
    "certificate_violation", "certificate_tolerance",
    "__version__",
]
