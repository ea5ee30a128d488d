import logging
from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.core.schedules import Schedule
from src.optim.base_opt import BaseOptConfig
from src.optim.sign_ops import SignMode, SignVariant
from src.utils.exceptions import OutOfRangeError, UnknownVariantError

logger = logging.getLogger(__name__)

VARIANTS: Tuple[str, ...] = (
    "dsm",
    "slowmo",
    "signed_slowmo",
    "local_avg",
    "global_adamw",
    "fedmv",
    "centralized_signsgd_momentum",
)


def check_variant(name: str) -> str:
    if name not in VARIANTS:
        raise UnknownVariantError(name, list(VARIANTS))
    return name


class SignConfig(BaseModel):
    """Sign operator of the global step; randomized variants use B = tau * direction_bound."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    variant: SignVariant = Field("hard", description="hard, randomized_bipolar or randomized_sparse")
    direction_bound: Optional[float] = Field(
        None, gt=0, description="Declared bound R on every local direction norm"
    )

    @model_validator(mode="after")
    def randomized_needs_bound(self):
        if self.variant != "hard" and self.direction_bound is None:
            raise ValueError(f"{self.variant} requires direction_bound")
        return self


class SlowMoConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    beta: float = Field(0.5, ge=0, lt=1, description="Slow momentum coefficient (slowmo, signed_slowmo)")
    alpha: float = Field(1.0, gt=0, description="SlowMo global learning rate")


class FedMVConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    alpha: float = Field(0.0, ge=0, description="Outer extrapolation coefficient for y_t")
    beta: float = Field(0.9, ge=0, lt=1, description="Per-worker momentum coefficient")
    bound_B: Optional[float] = Field(None, gt=0, description="Norm bound B of the voting sign operator")


class HyperConfig(BaseModel):
    """One simulated training run."""

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        json_schema_extra={
            "example": {
                "variant": "dsm",
                "n": 8,
                "tau": 12,
                "rounds": 200,
                "local_lr": {"kind": "cosine", "peak": 0.05, "warmup_steps": 20, "total_steps": 200},
                "global_lr": 1.0,
                "beta1": 0.95,
                "beta2": 0.98,
                "weight_decay": 0.1,
                "base_opt": {"kind": "adamw"},
                "seed": 0,
            }
        },
    )

    variant: str = Field("dsm", description=f"One of {', '.join(VARIANTS)}")
    n: int = Field(1, ge=1, le=1024, description="Number of workers")
    tau: int = Field(1, ge=1, description="Local steps per round")
    rounds: int = Field(1, ge=1, description="Outer rounds T")
    local_lr: Schedule = Field(
        default_factory=lambda: Schedule(peak=0.01), description="Local learning rate gamma_t per round"
    )
    global_lr: float = Field(1.0, gt=0, description="Global learning rate eta")
    beta1: float = Field(0.95, ge=0, le=1, description="Interpolation coefficient of the global step")
    beta2: float = Field(0.98, ge=0, le=1, description="Momentum coefficient of the global step")
    weight_decay: float = Field(0.1, ge=0, description="Decoupled weight decay lambda of the global step")
    eps: float = Field(1e-8, gt=0, description="Denominator epsilon of global_adamw")
    sign: SignConfig = Field(default_factory=SignConfig)
    base_opt: BaseOptConfig = Field(default_factory=BaseOptConfig)
    slowmo: SlowMoConfig = Field(default_factory=SlowMoConfig)
    fedmv: FedMVConfig = Field(default_factory=FedMVConfig)
    seed: int = Field(0, ge=0, lt=2**64, description="Base seed of every random stream")
    jobs: int = Field(1, ge=1, description="Threads running worker local phases")
    inner_metrics: bool = Field(False, description="Record drift and ||grad f(x_{t,k})||^2 at every local step")
    instrument: bool = Field(False, description="Record per-step directions and momenta for replay checks")
    snapshot_dim_limit: int = Field(64, ge=0, description="Keep full x snapshots when d is at most this")
    max_work: int = Field(20_000_000, ge=1, description="Upper bound on n * tau * rounds")

    @field_validator("variant")
    @classmethod
    def known_variant(cls, v: str) -> str:
        return check_variant(v)

    @model_validator(mode="after")
    def within_budget(self):
        work = self.n * self.tau * self.rounds
        if work > self.max_work:
            raise OutOfRangeError(
                field="rounds",
                value=work,
                max_value=self.max_work,
                message=f"n * tau * rounds = {work} exceeds max_work",
            )
        if self.local_lr.kind == "cosine" and self.local_lr.total_steps < self.rounds - 1:
            raise ValueError("local_lr.total_steps must cover every round")
        if self.variant == "fedmv" and self.fedmv.bound_B is None:
            raise ValueError("fedmv requires fedmv.bound_B")
        if self.variant == "global_adamw" and max(self.beta1, self.beta2) >= 1:
            raise ValueError("global_adamw requires beta1, beta2 < 1")
        return self

    @property
    def sign_mode(self) -> SignMode:
        if self.sign.variant == "hard":
            return SignMode()
        return SignMode(variant=self.sign.variant, bound_B=self.tau * self.sign.direction_bound)

    @property
    def fedmv_sign_mode(self) -> SignMode:
        return SignMode(variant="randomized_bipolar", bound_B=self.fedmv.bound_B)
