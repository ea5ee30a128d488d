import logging
import math
from typing import Sequence

import numpy as np

from src.core.rng import RngStream
from src.core.vectors import ParamVector
from src.problems.base import Problem
from src.utils.exceptions import PreconditionError

logger = logging.getLogger(__name__)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


class LogisticProblem(Problem):
    """
    l2-regularized binary logistic regression over per-worker sample shards.

    f_i(w) = mean_j log(1 + exp(-s_j <a_j, w>)) + reg/2 ||w||^2 with
    s_j = 2 y_j - 1.
    """

    kind = "logistic"

    def __init__(
        self,
        features: Sequence[np.ndarray],
        labels: Sequence[np.ndarray],
        reg: float = 1e-3,
        x0: ParamVector | None = None,
    ):
        if len(features) == 0 or len(features) != len(labels):
            raise PreconditionError("Need one (features, labels) shard per worker", field="features")
        if reg < 0:
            raise PreconditionError("reg must be nonnegative", field="reg", value=reg)
        self.features = [np.array(a, dtype=np.float64) for a in features]
        self.labels = [np.array(y, dtype=np.float64) for y in labels]
        dim = self.features[0].shape[1]
        for a, y in zip(self.features, self.labels):
            if a.ndim != 2 or a.shape[1] != dim or a.shape[0] != y.shape[0] or a.shape[0] == 0:
                raise PreconditionError("Shards must be non-empty with consistent shapes", field="features")
            if not np.all((y == 0.0) | (y == 1.0)):
                raise PreconditionError("Labels must be binary", field="labels")
        self._signs = [2.0 * y - 1.0 for y in self.labels]
        self.reg = float(reg)
        super().__init__(len(self.features), dim, np.zeros(dim) if x0 is None else x0)

    def local_loss(self, worker_id: int, x: ParamVector) -> float:
        margins = self._signs[worker_id] * (self.features[worker_id] @ x)
        return float(np.mean(np.logaddexp(0.0, -margins))) + 0.5 * self.reg * float(x @ x)

    def local_grad(self, worker_id: int, x: ParamVector) -> ParamVector:
        a, s = self.features[worker_id], self._signs[worker_id]
        weights = -s * _sigmoid(-s * (a @ x))
        return a.T @ weights / a.shape[0] + self.reg * x

    def stochastic_grad(self, worker_id: int, x: ParamVector, rng: RngStream) -> ParamVector:
        a, s = self.features[worker_id], self._signs[worker_id]
        j = int(rng.integers(a.shape[0]))
        weight = -s[j] * _sigmoid(-s[j] * float(a[j] @ x))
        return weight * a[j] + self.reg * x

    def smoothness_upper_bound(self) -> float:
        bounds = [
            0.25 * float(np.linalg.eigvalsh(a.T @ a / a.shape[0])[-1]) for a in self.features
        ]
        return max(bounds) + self.reg

    def describe(self) -> dict:
        return {**super().describe(), "reg": self.reg, "samples": [a.shape[0] for a in self.features]}


def make_logistic(
    dim: int,
    n_workers: int,
    rng: RngStream,
    samples_per_worker: int = 256,
    heterogeneity: float = 0.0,
    reg: float = 1e-3,
    init_scale: float = 1.0,
) -> LogisticProblem:
    """
    Labels drawn from a planted linear model with margins of standard deviation 2.

    Inputs are standard normal, shifted per worker by `heterogeneity`; x0 has
    norm close to `init_scale`.
    """
    w_true = rng.standard_normal(dim) * (2.0 / math.sqrt(dim))
    features, labels = [], []
    for _ in range(n_workers):
        shift = heterogeneity * rng.standard_normal(dim)
        a = rng.standard_normal((samples_per_worker, dim)) + shift
        y = (rng.random(samples_per_worker) < _sigmoid(a @ w_true)).astype(np.float64)
        features.append(a)
        labels.append(y)
    x0 = init_scale * rng.standard_normal(dim) / math.sqrt(dim)
    return LogisticProblem(features, labels, reg=reg, x0=x0)
