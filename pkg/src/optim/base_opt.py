"""
Local base optimizers.

Each optimizer turns a stochastic gradient into the direction d consumed by
the uniform local step x <- x - gamma * d. Decoupled weight decay is part of
the returned direction (d includes lambda * x), so AdamW and Lion reproduce
their textbook updates under that single rule.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.vectors import ParamVector, zeros
from src.optim.sign_ops import hard_sign

logger = logging.getLogger(__name__)

BaseOptKind = Literal["sgd", "polyak", "adamw", "lion"]


class BaseOptConfig(BaseModel):
    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        json_schema_extra={"example": {"kind": "adamw", "beta1": 0.9, "beta2": 0.95, "weight_decay": 0.1}},
    )

    kind: BaseOptKind = Field("sgd", description="Base optimizer run on every worker")
    beta1: float = Field(0.9, ge=0, lt=1, description="First-moment coefficient (adamw, lion)")
    beta2: float = Field(0.95, ge=0, lt=1, description="Second-moment / buffer coefficient (adamw, lion)")
    momentum: float = Field(0.9, ge=0, lt=1, description="Polyak momentum coefficient")
    weight_decay: float = Field(0.0, ge=0, description="Decoupled weight decay inside the direction")
    eps: float = Field(1e-8, gt=0, description="AdamW denominator epsilon")

    @model_validator(mode="before")
    @classmethod
    def decay_defaults(cls, data):
        # adamw and lion default to lambda = 0.1, sgd and polyak to 0
        if isinstance(data, dict) and data.get("kind") in ("adamw", "lion") and "weight_decay" not in data:
            data = {**data, "weight_decay": 0.1}
        return data


@dataclass
class BaseOptState:
    kind: BaseOptKind
    m: ParamVector
    v: ParamVector
    beta1: float = 0.9
    beta2: float = 0.95
    momentum: float = 0.9
    weight_decay: float = 0.0
    eps: float = 1e-8
    step_count: int = field(default=0)

    @classmethod
    def fresh(cls, config: BaseOptConfig, dim: int) -> "BaseOptState":
        return cls(
            kind=config.kind,
            m=zeros(dim),
            v=zeros(dim),
            beta1=config.beta1,
            beta2=config.beta2,
            momentum=config.momentum,
            weight_decay=config.weight_decay,
            eps=config.eps,
        )

    def reset(self) -> None:
        self.m = np.zeros_like(self.m)
        self.v = np.zeros_like(self.v)
        self.step_count = 0


def sgd_direction(state: BaseOptState, grad: ParamVector) -> ParamVector:
    state.step_count += 1
    return grad


def polyak_direction(state: BaseOptState, grad: ParamVector, beta: float | None = None) -> ParamVector:
    beta = state.momentum if beta is None else beta
    state.m = beta * state.m + grad
    state.step_count += 1
    return state.m


def adamw_direction(state: BaseOptState, grad: ParamVector, x: ParamVector) -> ParamVector:
    state.step_count += 1
    t = state.step_count
    b1, b2 = state.beta1, state.beta2
    state.m = b1 * state.m + (1.0 - b1) * grad
    state.v = b2 * state.v + (1.0 - b2) * (grad * grad)
    m_hat = state.m / (1.0 - b1 ** t)
    v_hat = state.v / (1.0 - b2 ** t)
    return m_hat / (np.sqrt(v_hat) + state.eps) + state.weight_decay * x


def lion_direction(state: BaseOptState, grad: ParamVector, x: ParamVector) -> ParamVector:
    b1, b2 = state.beta1, state.beta2
    d = hard_sign(b1 * state.m + (1.0 - b1) * grad) + state.weight_decay * x
    state.m = b2 * state.m + (1.0 - b2) * grad
    state.step_count += 1
    return d


_DIRECTIONS: Dict[str, Callable[[BaseOptState, ParamVector, ParamVector], ParamVector]] = {
    "sgd": lambda state, grad, x: sgd_direction(state, grad),
    "polyak": lambda state, grad, x: polyak_direction(state, grad),
    "adamw": adamw_direction,
    "lion": lion_direction,
}


def direction(state: BaseOptState, grad: ParamVector, x: ParamVector) -> ParamVector:
    """Dispatch on state.kind."""
    return _DIRECTIONS[state.kind](state, grad, x)
