import logging
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.rng import GLOBAL_WORKER, Phase, derive_stream
from src.problems.base import Problem
from src.problems.logistic import make_logistic
from src.problems.mlp import make_mlp
from src.problems.quadratic import make_quadratic

logger = logging.getLogger(__name__)

ProblemKind = Literal["quadratic", "logistic", "mlp"]


class ProblemSpec(BaseModel):
    """Everything needed to rebuild a synthetic problem; n comes from the algorithm block."""

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        json_schema_extra={
            "example": {
                "kind": "quadratic",
                "dim": 32,
                "noise_sigma": 0.5,
                "delta_sq": 1.0,
                "structural_seed": 7,
            }
        },
    )

    kind: ProblemKind = Field("quadratic", description="Problem family")
    dim: int = Field(16, ge=1, le=4096, description="Parameter dimension (input dimension for mlp)")
    noise_sigma: float = Field(
        0.0, ge=0, description="Quadratic gradient noise sigma; label noise for mlp"
    )
    heterogeneity: float = Field(0.0, ge=0, description="Scale of per-worker center or input shifts")
    delta_sq: Optional[float] = Field(
        None, ge=0, description="Exact target heterogeneity delta^2 (quadratic only, overrides heterogeneity)"
    )
    structural_seed: int = Field(0, ge=0, description="Seed of the problem generator")
    samples_per_worker: int = Field(256, ge=1, le=4096, description="Shard size for sample-based problems")
    hidden_units: int = Field(8, ge=1, description="Hidden width of the mlp")
    curvature_min: float = Field(0.1, ge=0, description="Smallest eigenvalue of the quadratic's A")
    curvature_max: float = Field(1.0, gt=0, description="Largest eigenvalue of the quadratic's A (= L)")
    reg: float = Field(1e-3, ge=0, description="l2 regularization of the logistic loss")
    init_scale: float = Field(1.0, ge=0, description="Distance of x0 from the generator's reference point")

    @model_validator(mode="after")
    def curvature_ordered(self):
        if self.curvature_min > self.curvature_max:
            raise ValueError("curvature_min must not exceed curvature_max")
        if self.delta_sq is not None and self.kind != "quadratic":
            raise ValueError("delta_sq applies to the quadratic family only")
        return self


def make_problem(spec: ProblemSpec, n_workers: int) -> Problem:
    """Build the problem described by `spec`; equal (spec, n_workers) give identical problems."""
    rng = derive_stream(spec.structural_seed, GLOBAL_WORKER, 0, Phase.STRUCTURE)
    if spec.kind == "quadratic":
        problem = make_quadratic(
            spec.dim,
            n_workers,
            rng,
            noise_sigma=spec.noise_sigma,
            heterogeneity=spec.heterogeneity,
            delta_sq=spec.delta_sq,
            curvature_min=spec.curvature_min,
            curvature_max=spec.curvature_max,
            init_scale=spec.init_scale,
        )
    elif spec.kind == "logistic":
        problem = make_logistic(
            spec.dim,
            n_workers,
            rng,
            samples_per_worker=spec.samples_per_worker,
            heterogeneity=spec.heterogeneity,
            reg=spec.reg,
            init_scale=spec.init_scale,
        )
    else:
        problem = make_mlp(
            spec.dim,
            n_workers,
            rng,
            hidden_units=spec.hidden_units,
            samples_per_worker=spec.samples_per_worker,
            heterogeneity=spec.heterogeneity,
            label_noise=spec.noise_sigma,
            init_scale=spec.init_scale,
        )
    logger.debug(f"Built problem {problem.describe()}")
    return problem
