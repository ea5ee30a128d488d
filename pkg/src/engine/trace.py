"""Per-round records of a run and the optional debug stream."""

import hashlib
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from src.core.vectors import ParamVector
from src.utils.exceptions import PreconditionError

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["round", "gamma_t", "loss", "grad_l1", "grad_l2sq", "max_dir_norm", "x_hash"]


class RoundRecord(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    round: int = Field(..., ge=0, description="t; record t describes x_{t,0}")
    gamma_t: float = Field(..., ge=0, description="Local rate of the round that produced x_{t,0}")
    loss: float = Field(..., description="f(x_{t,0})")
    grad_l1: float = Field(..., ge=0, description="||grad f(x_{t,0})||_1")
    grad_l2sq: float = Field(..., ge=0, description="||grad f(x_{t,0})||_2^2")
    max_dir_norm: float = Field(..., ge=0, description="Largest local direction norm of that round")
    x_hash: str = Field(..., description="64-bit content hash of x_{t,0}")


@dataclass
class DebugRound:
    """
    Everything needed to replay round t outside the engine.

    avg_directions[k] is d_{t,k} = (1/n) sum_i d^{(i)}_{t,k}; worker0_directions
    is worker 0's own sequence. `sign` is the S(u_t) the global step applied,
    None when the round skipped it.
    """

    round: int
    gamma: float
    x: ParamVector
    m: ParamVector
    avg_directions: np.ndarray
    worker0_directions: np.ndarray
    sign: Optional[ParamVector] = None


@dataclass
class RunTrace:
    config: Dict[str, Any]
    records: List[RoundRecord] = field(default_factory=list)
    momentum_norms: List[float] = field(default_factory=list)
    snapshots: List[ParamVector] = field(default_factory=list)
    inner_grad_sq: List[float] = field(default_factory=list)
    drift: List[float] = field(default_factory=list)
    debug: List[DebugRound] = field(default_factory=list)
    x_final: Optional[ParamVector] = None

    @property
    def rounds(self) -> int:
        return len(self.records) - 1

    @property
    def max_dir_norm(self) -> float:
        """R-hat: largest local direction norm over the whole run."""
        return max((r.max_dir_norm for r in self.records), default=0.0)

    @property
    def max_momentum_norm(self) -> float:
        return max(self.momentum_norms, default=0.0)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records], dtype=np.float64)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.model_dump() for r in self.records], columns=TRACE_COLUMNS)

    def inner_grad_sq_average(self) -> float:
        """(1/(tau T)) sum_t sum_k ||grad f(x_{t,k})||^2."""
        if not self.inner_grad_sq:
            raise PreconditionError("Run was not recorded with inner_metrics", field="inner_metrics")
        return float(np.mean(self.inner_grad_sq))

    def drift_average(self) -> float:
        if not self.drift:
            raise PreconditionError("Run was not recorded with inner_metrics", field="inner_metrics")
        return float(np.mean(self.drift))

    def fingerprint(self) -> str:
        """Hash chain of every x_{t,0}; equal fingerprints mean identical trajectories."""
        digest = hashlib.blake2b(digest_size=16)
        for r in self.records:
            digest.update(r.x_hash.encode())
        return digest.hexdigest()
