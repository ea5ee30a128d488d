from .sign_ops import (
    NORM_SLACK,
    SignMode,
    hard_sign,
    randomized_sign,
    randomized_sign_batch,
    apply_sign,
    majority_vote_sign,
)
from .base_opt import (
    BaseOptConfig,
    BaseOptState,
    sgd_direction,
    polyak_direction,
    adamw_direction,
    lion_direction,
    direction,
)

__all__ = [
    "NORM_SLACK",
    "SignMode",
    "hard_sign",
    "randomized_sign",
    "randomized_sign_batch",
    "apply_sign",
    "majority_vote_sign",
    "BaseOptConfig",
    "BaseOptState",
    "sgd_direction",
    "polyak_direction",
    "adamw_direction",
    "lion_direction",
    "direction",
]
