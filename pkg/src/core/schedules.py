import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.utils.exceptions import OutOfRangeError


class Schedule(BaseModel):
    """Local learning-rate schedule gamma_t, indexed by outer round."""

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        json_schema_extra={
            "example": {
                "kind": "cosine",
                "peak": 5e-4,
                "warmup_steps": 2000,
                "total_steps": 100000,
                "floor_fraction": 0.05,
            }
        },
    )

    kind: Literal["constant", "cosine"] = Field("constant", description="constant or cosine-with-warmup")
    peak: float = Field(..., gt=0, description="Peak (or constant) learning rate")
    warmup_steps: int = Field(0, ge=0, description="Length of the linear ramp from 0")
    total_steps: int = Field(1, ge=1, description="Step at which the floor is reached")
    floor_fraction: float = Field(0.05, ge=0, le=1, description="Final rate as a fraction of peak")

    @model_validator(mode="after")
    def warmup_within_horizon(self):
        if self.kind == "cosine" and self.warmup_steps > self.total_steps:
            raise ValueError("warmup_steps must not exceed total_steps")
        return self


def cosine_schedule(step: int, s: Schedule) -> float:
    """Linear ramp 0 -> peak over warmup, then cosine decay to floor_fraction * peak."""
    if step < 0 or step > s.total_steps:
        raise OutOfRangeError(field="step", value=step, min_value=0, max_value=s.total_steps)
    if s.warmup_steps > 0 and step < s.warmup_steps:
        return s.peak * step / s.warmup_steps
    floor = s.floor_fraction * s.peak
    span = s.total_steps - s.warmup_steps
    if span == 0:
        return s.peak
    progress = (step - s.warmup_steps) / span
    return floor + (s.peak - floor) * 0.5 * (1.0 + math.cos(math.pi * progress))


def learning_rate(step: int, s: Schedule) -> float:
    if s.kind == "constant":
        if step < 0:
            raise OutOfRangeError(field="step", value=step, min_value=0)
        return s.peak
    return cosine_schedule(step, s)


def constant(rate: float) -> Schedule:
    return Schedule(kind="constant", peak=rate)
