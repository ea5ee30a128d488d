from .constants import (
    TheoremConstants,
    power_iteration,
    estimate_smoothness,
    estimate_sigma,
    estimate_zeta,
    estimate_delta,
    estimate_constants,
)
from .bounds import (
    theorem1_terms,
    theorem1_rhs,
    theorem1_min_T,
    theorem2_terms,
    theorem2_rhs,
    theorem2_min_T,
    theorem3_terms,
    theorem3_rhs,
    local_drift_bound,
    theorem1_prescription,
    theorem3_prescription,
)
from .rates import fit_rate, running_min, time_average_of_running_min, time_average
from .invariants import momentum_bound_ratio, virtual_iterate_residual

__all__ = [
    "TheoremConstants",
    "power_iteration",
    "estimate_smoothness",
    "estimate_sigma",
    "estimate_zeta",
    "estimate_delta",
    "estimate_constants",
    "theorem1_terms",
    "theorem1_rhs",
    "theorem1_min_T",
    "theorem2_terms",
    "theorem2_rhs",
    "theorem2_min_T",
    "theorem3_terms",
    "theorem3_rhs",
    "local_drift_bound",
    "theorem1_prescription",
    "theorem3_prescription",
    "fit_rate",
    "running_min",
    "time_average_of_running_min",
    "time_average",
    "momentum_bound_ratio",
    "virtual_iterate_residual",
]
