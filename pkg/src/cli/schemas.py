from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.engine.config import HyperConfig, check_variant
from src.problems.factory import ProblemSpec

Prescription = Literal["none", "theorem1", "theorem3"]
RateMetric = Literal["grad_l2sq_average", "grad_l1_running_min", "inner_grad_sq"]
TraceFormat = Literal["csv", "jsonl"]


class SweepSpec(BaseModel):
    """Cells of a sweep are (variant, seed, rounds); everything else comes from the algorithm block."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    rounds_grid: Optional[List[int]] = Field(None, description="Horizons T; defaults to algorithm.rounds")
    seeds: int = Field(1, ge=1, description="Seed count; seeds are algorithm.seed + 0..seeds-1")
    variants: Optional[List[str]] = Field(None, description="Variants; defaults to algorithm.variant")
    prescription: Prescription = Field("none", description="Rewrite gamma, eta and beta per horizon")
    rate_metric: RateMetric = Field("grad_l2sq_average", description="Quantity whose log-log slope is fitted")
    report_gap: bool = Field(False, description="Report the reduction of f(x) - f_* per cell")
    speedup: List[List[int]] = Field(
        default_factory=list, description="[n, tau] pairs compared at the largest horizon"
    )
    speedup_rounds: Optional[int] = Field(None, ge=1, description="Horizon of the speedup comparison; defaults to the largest")
    overrides: Dict[str, Dict[str, Any]] = Field(
        default_factory=dict, description="Per-variant replacements of algorithm keys"
    )

    @field_validator("rounds_grid")
    @classmethod
    def positive_rounds(cls, v: Optional[List[int]]) -> Optional[List[int]]:
        if v is not None and (not v or any(t < 1 for t in v)):
            raise ValueError("rounds_grid needs positive horizons")
        return v

    @field_validator("variants")
    @classmethod
    def known_variants(cls, v: Optional[List[str]]) -> Optional[List[str]]:
        if v is not None:
            for name in v:
                check_variant(name)
        return v

    @field_validator("overrides")
    @classmethod
    def known_override_variants(cls, v: Dict[str, Dict[str, Any]]) -> Dict[str, Dict[str, Any]]:
        for name in v:
            check_variant(name)
        return v

    @field_validator("speedup")
    @classmethod
    def pairs(cls, v: List[List[int]]) -> List[List[int]]:
        if any(len(p) != 2 or min(p) < 1 for p in v):
            raise ValueError("speedup entries are [n, tau] with n, tau >= 1")
        return v


class OutputSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    directory: str = Field("results", description="Directory receiving trace files and the summary")
    formats: List[TraceFormat] = Field(default_factory=lambda: ["csv"], description="Trace file formats")
    jobs: int = Field(1, ge=1, description="Sweep cells run concurrently")


class ExperimentSpec(BaseModel):
    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        json_schema_extra={
            "example": {
                "name": "dsm-quadratic",
                "problem": {"kind": "quadratic", "dim": 32, "noise_sigma": 0.5},
                "algorithm": {"variant": "dsm", "n": 8, "tau": 12, "rounds": 200},
                "sweep": {"rounds_grid": [256, 1024, 4096], "seeds": 3},
                "output": {"directory": "results/dsm", "formats": ["csv"]},
            }
        },
    )

    name: str = Field("experiment", min_length=1, description="Label used in logs and reports")
    problem: ProblemSpec = Field(default_factory=ProblemSpec)
    algorithm: HyperConfig = Field(default_factory=HyperConfig)
    sweep: SweepSpec = Field(default_factory=SweepSpec)
    output: OutputSpec = Field(default_factory=OutputSpec)

    @model_validator(mode="after")
    def prescription_inputs(self):
        if self.sweep.prescription == "theorem1" and self.algorithm.sign.direction_bound is None:
            raise ValueError("theorem1 prescription needs algorithm.sign.direction_bound")
        return self

    @property
    def variants(self) -> List[str]:
        return self.sweep.variants or [self.algorithm.variant]

    @property
    def rounds_grid(self) -> List[int]:
        return self.sweep.rounds_grid or [self.algorithm.rounds]

    @property
    def seeds(self) -> List[int]:
        return [self.algorithm.seed + s for s in range(self.sweep.seeds)]


class CellResult(BaseModel):
    variant: str
    rounds: int
    seed: int
    n: int
    tau: int
    status: Literal["ok", "aborted"]
    error: Optional[str] = None
    exit_code: int = 0
    final_loss: Optional[float] = None
    final_grad_l1: Optional[float] = None
    final_grad_l2sq: Optional[float] = None
    metric: Optional[float] = Field(None, description="Value of the sweep's rate metric")
    max_dir_norm: Optional[float] = None
    max_momentum_norm: Optional[float] = None
    gap_reduction: Optional[float] = None
    files: List[str] = Field(default_factory=list)


class ExperimentResult(BaseModel):
    name: str
    cells: List[CellResult]
    slopes: Dict[str, Optional[float]] = Field(default_factory=dict, description="Fitted slope per variant")
    summary_path: Optional[str] = None
