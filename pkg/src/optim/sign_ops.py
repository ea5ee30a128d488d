"""
Sign operators.

`hard_sign` is the deterministic sign with sign(0) = 0. The two randomized
operators map a vector v with ||v||_2 <= B to {-1, 0, +1}^d so that
E[S_r(v)] = v / B:

* bipolar: +sign(v_j) w.p. 1/2 + |v_j|/(2B), otherwise -sign(v_j)
* sparse:  sign(v_j) w.p. |v_j|/B, otherwise 0

Each component consumes exactly one uniform draw, in index order.
"""

import logging
from typing import Literal, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.rng import RngStream
from src.core.vectors import ParamVector, norm_l2
from src.utils.exceptions import PreconditionError

logger = logging.getLogger(__name__)

# Relative slack on ||v|| <= B; only absorbs rounding, never clips.
NORM_SLACK = 1e-12

SignVariant = Literal["hard", "randomized_bipolar", "randomized_sparse"]


class SignMode(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    variant: SignVariant = Field("hard", description="Sign operator applied to the global buffer")
    bound_B: float | None = Field(None, gt=0, description="Norm bound B of the randomized operators")

    @model_validator(mode="after")
    def randomized_needs_bound(self):
        if self.variant != "hard" and self.bound_B is None:
            raise ValueError(f"{self.variant} requires bound_B")
        return self

    @property
    def randomized(self) -> bool:
        return self.variant != "hard"


def hard_sign(v: ParamVector) -> ParamVector:
    return np.sign(v).astype(np.float64, copy=False) + 0.0


def _check_bound(v: ParamVector, bound: float) -> None:
    norm = norm_l2(v)
    if norm > bound * (1.0 + NORM_SLACK):
        raise PreconditionError(
            f"Randomized sign needs ||v||_2 <= B, got {norm:.6g} > {bound:.6g}",
            field="bound_B",
            value=norm,
            constraint=f"||v||_2 <= {bound}",
        )


def _apply_randomized(v: ParamVector, variant: SignVariant, bound: float, u: np.ndarray) -> ParamVector:
    s = hard_sign(v)
    ratio = np.abs(v) / bound
    if variant == "randomized_bipolar":
        keep = u < 0.5 + 0.5 * ratio
        return np.where(keep, s, -s) + 0.0
    if variant == "randomized_sparse":
        return np.where(u < ratio, s, 0.0) + 0.0
    raise PreconditionError(f"Unknown randomized sign variant: {variant}", field="variant", value=variant)


def randomized_sign(v: ParamVector, mode: SignMode, rng: RngStream) -> ParamVector:
    if not mode.randomized:
        return hard_sign(v)
    _check_bound(v, mode.bound_B)
    u = rng.random(v.shape[0])
    return _apply_randomized(v, mode.variant, mode.bound_B, u)


def randomized_sign_batch(v: ParamVector, mode: SignMode, rng: RngStream, draws: int) -> np.ndarray:
    """`draws` independent applications to the same v, one row each.

    Row r equals what the r-th of `draws` successive randomized_sign calls
    on the same stream would return.
    """
    if not mode.randomized:
        return np.tile(hard_sign(v), (draws, 1))
    _check_bound(v, mode.bound_B)
    u = rng.random((draws, v.shape[0]))
    return _apply_randomized(v, mode.variant, mode.bound_B, u)


def apply_sign(v: ParamVector, mode: SignMode, rng: RngStream | None = None) -> ParamVector:
    if mode.randomized:
        if rng is None:
            raise PreconditionError("Randomized sign requires an RNG stream", field="rng")
        return randomized_sign(v, mode, rng)
    return hard_sign(v)


def majority_vote_sign(signs: Sequence[ParamVector]) -> ParamVector:
    if len(signs) == 0:
        raise PreconditionError("Majority vote over an empty list", field="signs", value=0)
    total = np.zeros_like(signs[0])
    for s in signs:
        if s.shape != total.shape:
            raise PreconditionError("Votes must have equal length", field="signs")
        total += s
    return hard_sign(total)
