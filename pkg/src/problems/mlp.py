import logging
import math
from typing import Sequence, Tuple

import numpy as np

from src.core.rng import RngStream
from src.core.vectors import ParamVector
from src.problems.base import Problem
from src.utils.exceptions import PreconditionError

logger = logging.getLogger(__name__)


class MlpProblem(Problem):
    """
    Two-layer tanh perceptron with squared loss, a nonconvex test objective.

    Parameters are flattened as [W1 (hidden x inputs, row-major), b1, w2, b2];
    f_i is half the mean squared residual over worker i's shard.
    """

    kind = "mlp"

    def __init__(
        self,
        inputs: Sequence[np.ndarray],
        targets: Sequence[np.ndarray],
        hidden_units: int,
        x0: ParamVector | None = None,
    ):
        if len(inputs) == 0 or len(inputs) != len(targets):
            raise PreconditionError("Need one (inputs, targets) shard per worker", field="inputs")
        if hidden_units < 1:
            raise PreconditionError("hidden_units must be positive", field="hidden_units", value=hidden_units)
        self.inputs = [np.array(a, dtype=np.float64) for a in inputs]
        self.targets = [np.array(y, dtype=np.float64) for y in targets]
        self.input_dim = self.inputs[0].shape[1]
        self.hidden_units = hidden_units
        for a, y in zip(self.inputs, self.targets):
            if a.ndim != 2 or a.shape[1] != self.input_dim or a.shape[0] != y.shape[0] or a.shape[0] == 0:
                raise PreconditionError("Shards must be non-empty with consistent shapes", field="inputs")
        dim = hidden_units * self.input_dim + 2 * hidden_units + 1
        super().__init__(len(self.inputs), dim, np.zeros(dim) if x0 is None else x0)

    def unpack(self, x: ParamVector) -> Tuple[np.ndarray, np.ndarray, np.ndarray, float]:
        h, p = self.hidden_units, self.input_dim
        w1 = x[: h * p].reshape(h, p)
        b1 = x[h * p: h * p + h]
        w2 = x[h * p + h: h * p + 2 * h]
        return w1, b1, w2, float(x[-1])

    def _forward(self, a: np.ndarray, x: ParamVector):
        w1, b1, w2, b2 = self.unpack(x)
        hidden = np.tanh(a @ w1.T + b1)
        return hidden, hidden @ w2 + b2

    def _grad_on(self, a: np.ndarray, y: np.ndarray, x: ParamVector) -> ParamVector:
        _, _, w2, _ = self.unpack(x)
        hidden, out = self._forward(a, x)
        r = (out - y) / a.shape[0]
        delta = np.outer(r, w2) * (1.0 - hidden * hidden)
        return np.concatenate([
            (delta.T @ a).reshape(-1),
            delta.sum(axis=0),
            hidden.T @ r,
            [r.sum()],
        ])

    def local_loss(self, worker_id: int, x: ParamVector) -> float:
        _, out = self._forward(self.inputs[worker_id], x)
        return 0.5 * float(np.mean((out - self.targets[worker_id]) ** 2))

    def local_grad(self, worker_id: int, x: ParamVector) -> ParamVector:
        return self._grad_on(self.inputs[worker_id], self.targets[worker_id], x)

    def stochastic_grad(self, worker_id: int, x: ParamVector, rng: RngStream) -> ParamVector:
        a = self.inputs[worker_id]
        j = int(rng.integers(a.shape[0]))
        return self._grad_on(a[j: j + 1], self.targets[worker_id][j: j + 1], x)

    def smoothness_upper_bound(self) -> float:
        # no closed form for this family; estimated numerically instead
        return math.inf

    def describe(self) -> dict:
        return {**super().describe(), "input_dim": self.input_dim, "hidden_units": self.hidden_units}


def make_mlp(
    input_dim: int,
    n_workers: int,
    rng: RngStream,
    hidden_units: int = 8,
    samples_per_worker: int = 256,
    heterogeneity: float = 0.0,
    label_noise: float = 0.1,
    init_scale: float = 0.5,
) -> MlpProblem:
    """Regression targets from a random planted network plus Gaussian label noise."""
    planted_w1 = rng.standard_normal((hidden_units, input_dim)) / math.sqrt(input_dim)
    planted_w2 = rng.standard_normal(hidden_units) / math.sqrt(hidden_units)
    inputs, targets = [], []
    for _ in range(n_workers):
        shift = heterogeneity * rng.standard_normal(input_dim)
        a = rng.standard_normal((samples_per_worker, input_dim)) + shift
        y = np.tanh(a @ planted_w1.T) @ planted_w2 + label_noise * rng.standard_normal(samples_per_worker)
        inputs.append(a)
        targets.append(y)
    dim = hidden_units * input_dim + 2 * hidden_units + 1
    x0 = init_scale * rng.standard_normal(dim) / math.sqrt(max(input_dim, hidden_units))
    return MlpProblem(inputs, targets, hidden_units, x0=x0)
