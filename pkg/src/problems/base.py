import math
from abc import ABC, abstractmethod
from typing import ClassVar

import numpy as np

from src.core.rng import RngStream
from src.core.vectors import ParamVector, mean_vectors


class Problem(ABC):
    """
    A finite-sum objective f(x) = (1/n) sum_i f_i(x) split over n workers.

    Problems are immutable after construction and may be read concurrently
    by every worker.
    """

    kind: ClassVar[str] = "abstract"

    def __init__(self, n_workers: int, dim: int, x0: ParamVector):
        self.n_workers = n_workers
        self.dim = dim
        self._x0 = np.array(x0, dtype=np.float64)
        self._x0.setflags(write=False)

    @property
    def x0(self) -> ParamVector:
        return self._x0.copy()

    @abstractmethod
    def local_loss(self, worker_id: int, x: ParamVector) -> float:
        ...

    @abstractmethod
    def local_grad(self, worker_id: int, x: ParamVector) -> ParamVector:
        """Exact gradient of f_i at x."""

    @abstractmethod
    def stochastic_grad(self, worker_id: int, x: ParamVector, rng: RngStream) -> ParamVector:
        """Unbiased one-sample estimate of the gradient of f_i at x."""

    @abstractmethod
    def smoothness_upper_bound(self) -> float:
        ...

    def loss(self, x: ParamVector) -> float:
        # anchored like mean_vectors: identical workers give the single-worker value bitwise
        losses = [self.local_loss(i, x) for i in range(self.n_workers)]
        return losses[0] + math.fsum(v - losses[0] for v in losses) / self.n_workers

    def full_grad(self, x: ParamVector) -> ParamVector:
        return mean_vectors([self.local_grad(i, x) for i in range(self.n_workers)])

    def describe(self) -> dict:
        return {"kind": self.kind, "dim": self.dim, "n_workers": self.n_workers}
