from .vectors import (
    ParamVector,
    as_param_vector,
    zeros,
    ensure_finite,
    mean_vectors,
    dot,
    norm_l1,
    norm_l2,
    norm_l2_sq,
    content_hash,
)
from .rng import GLOBAL_WORKER, Phase, RngStream, derive_stream
from .schedules import Schedule, cosine_schedule, learning_rate, constant

__all__ = [
    "ParamVector",
    "as_param_vector",
    "zeros",
    "ensure_finite",
    "mean_vectors",
    "dot",
    "norm_l1",
    "norm_l2",
    "norm_l2_sq",
    "content_hash",
    "GLOBAL_WORKER",
    "Phase",
    "RngStream",
    "derive_stream",
    "Schedule",
    "cosine_schedule",
    "learning_rate",
    "constant",
]
