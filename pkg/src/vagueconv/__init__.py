"""Exact finite atomic signed measures, the almost-basic metric, and convergence diagnostics."""

from .errors import ConsistencyError, ContractViolation, DomainError
from .measure import (
    SignedMeasure,
    TestFunction,
    cdf,
    derivative_step,
    from_cdf,
    hahn_jordan,
    integrate,
    integrate_step_product,
    interval_mass,
    tv_on_interval,
)
from .metric import (
    DistanceBracket,
    almost_basic_distance,
    best_shift,
    feasible,
    shift_estimate,
)
from .stepfn import (
    StepFunction,
    eval_at,
    level_excess,
    linear_combine,
    normalize_to_W,
    total_variation_on,
)

__all__ = [
    "ConsistencyError",
    "ContractViolation",
    "DistanceBracket",
    "DomainError",
    "SignedMeasure",
    "StepFunction",
    "TestFunction",
    "almost_basic_distance",
    "best_shift",
    "cdf",
    "derivative_step",
    "eval_at",
    "feasible",
    "from_cdf",
    "hahn_jordan",
    "integrate",
    "integrate_step_product",
    "interval_mass",
    "level_excess",
    "linear_combine",
    "normalize_to_W",
    "shift_estimate",
    "total_variation_on",
    "tv_on_interval",
]
