import logging
import math
from typing import Sequence

import numpy as np

from src.core.rng import RngStream
from src.core.vectors import ParamVector, mean_vectors, norm_l2_sq
from src.problems.base import Problem
from src.utils.exceptions import PreconditionError

logger = logging.getLogger(__name__)


class QuadraticProblem(Problem):
    """
    f_i(x) = 1/2 (x - b_i)^T A (x - b_i) with shared curvature A.

    The global optimum is the mean center b_bar, L = lambda_max(A), and
    grad f(x) - grad f_i(x) = A (b_i - b_bar) does not depend on x, so the
    heterogeneity delta^2 is an exact constant. Stochastic gradients add
    Gaussian noise with per-component variance noise_sigma^2 / d.
    """

    kind = "quadratic"

    def __init__(
        self,
        A: np.ndarray,
        centers: Sequence[ParamVector],
        noise_sigma: float = 0.0,
        x0: ParamVector | None = None,
    ):
        A = np.array(A, dtype=np.float64)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise PreconditionError("A must be a square matrix", field="A", value=list(A.shape))
        if not np.allclose(A, A.T, rtol=0, atol=1e-12 * max(1.0, float(np.abs(A).max()))):
            raise PreconditionError("A must be symmetric", field="A")
        A = 0.5 * (A + A.T)
        eigs = np.linalg.eigvalsh(A)
        if eigs[0] < -1e-10 * max(1.0, abs(eigs[-1])):
            raise PreconditionError("A must be positive semidefinite", field="A", value=float(eigs[0]))
        if noise_sigma < 0:
            raise PreconditionError("noise_sigma must be nonnegative", field="noise_sigma", value=noise_sigma)

        centers = [np.array(b, dtype=np.float64) for b in centers]
        if len(centers) == 0:
            raise PreconditionError("At least one worker center is required", field="centers", value=0)
        dim = A.shape[0]
        for b in centers:
            if b.shape != (dim,):
                raise PreconditionError("Centers must match the dimension of A", field="centers")

        self.A = A
        self.A.setflags(write=False)
        self.centers = centers
        self.noise_sigma = float(noise_sigma)
        self.center_mean = mean_vectors(centers)
        self._noise_scale = self.noise_sigma / math.sqrt(dim)
        super().__init__(len(centers), dim, self.center_mean.copy() if x0 is None else x0)

    def local_loss(self, worker_id: int, x: ParamVector) -> float:
        r = x - self.centers[worker_id]
        return 0.5 * float(r @ (self.A @ r))

    def local_grad(self, worker_id: int, x: ParamVector) -> ParamVector:
        return self.A @ (x - self.centers[worker_id])

    def full_grad(self, x: ParamVector) -> ParamVector:
        return self.A @ (x - self.center_mean)

    def stochastic_grad(self, worker_id: int, x: ParamVector, rng: RngStream) -> ParamVector:
        g = self.local_grad(worker_id, x)
        if self.noise_sigma > 0:
            g = g + self._noise_scale * rng.standard_normal(self.dim)
        return g

    def smoothness_upper_bound(self) -> float:
        return float(np.linalg.eigvalsh(self.A)[-1])

    def optimum_value(self) -> float:
        return self.loss(self.center_mean)

    def heterogeneity_delta_sq(self) -> float:
        offsets = [self.A @ (b - self.center_mean) for b in self.centers]
        return float(np.mean([norm_l2_sq(o) for o in offsets]))

    def describe(self) -> dict:
        return {**super().describe(), "noise_sigma": self.noise_sigma}


def make_quadratic(
    dim: int,
    n_workers: int,
    rng: RngStream,
    noise_sigma: float = 0.0,
    heterogeneity: float = 0.0,
    delta_sq: float | None = None,
    curvature_min: float = 0.1,
    curvature_max: float = 1.0,
    init_scale: float = 1.0,
) -> QuadraticProblem:
    """Random rotation of an evenly spaced spectrum in [curvature_min, curvature_max]."""
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    spectrum = np.linspace(curvature_max, curvature_min, dim) if dim > 1 else np.array([curvature_max])
    A = (q * spectrum) @ q.T
    A = 0.5 * (A + A.T)

    center = rng.standard_normal(dim) / math.sqrt(dim)
    # drawn before the offsets so that A, the optimum and x0 do not depend on n
    direction = rng.standard_normal(dim)
    offsets = rng.standard_normal((n_workers, dim)) / math.sqrt(dim)
    offsets -= offsets.mean(axis=0)
    scale = heterogeneity
    if delta_sq is not None and n_workers > 1:
        # delta^2 is quadratic in the offset scale
        unit = QuadraticProblem(A, [center + o for o in offsets]).heterogeneity_delta_sq()
        scale = math.sqrt(delta_sq / unit) if unit > 0 else 0.0
    problem = QuadraticProblem(A, [center + scale * o for o in offsets], noise_sigma)

    x0 = problem.center_mean + init_scale * direction / np.linalg.norm(direction)
    logger.debug(f"Built quadratic problem d={dim} n={n_workers} delta_sq={problem.heterogeneity_delta_sq():.4g}")
    return QuadraticProblem(A, problem.centers, noise_sigma, x0=x0)
