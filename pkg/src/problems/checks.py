import logging

import numpy as np

from src.core.rng import RngStream
from src.core.vectors import ParamVector
from src.problems.base import Problem
from src.problems.quadratic import QuadraticProblem
from src.utils.exceptions import PreconditionError, UnsupportedProblemError

logger = logging.getLogger(__name__)


def stochastic_grad(problem: Problem, worker_id: int, x: ParamVector, rng: RngStream) -> ParamVector:
    if not 0 <= worker_id < problem.n_workers:
        raise PreconditionError(
            f"worker_id must lie in [0, {problem.n_workers})", field="worker_id", value=worker_id
        )
    return problem.stochastic_grad(worker_id, x, rng)


def full_grad(problem: Problem, x: ParamVector) -> ParamVector:
    return problem.full_grad(x)


def heterogeneity_delta_sq(problem: Problem) -> float:
    """(1/n) sum_i ||grad f(x) - grad f_i(x)||^2, exact only for the quadratic family."""
    if not isinstance(problem, QuadraticProblem):
        raise UnsupportedProblemError("heterogeneity_delta_sq", problem.kind)
    return problem.heterogeneity_delta_sq()


def finite_difference_check(problem: Problem, x: ParamVector, h: float = 1e-5) -> float:
    """
    Compare central differences of f against full_grad.

    Returns max_j |fd_j - g_j| / max(||g||_inf, ||fd||_inf, 1e-12).
    """
    if h <= 0:
        raise PreconditionError("Step h must be positive", field="h", value=h)
    x = np.array(x, dtype=np.float64)
    g = problem.full_grad(x)
    fd = np.empty_like(g)
    for j in range(x.shape[0]):
        e = np.zeros_like(x)
        e[j] = h
        fd[j] = (problem.loss(x + e) - problem.loss(x - e)) / (2.0 * h)
    scale = max(float(np.max(np.abs(g))), float(np.max(np.abs(fd))), 1e-12)
    error = float(np.max(np.abs(fd - g))) / scale
    logger.debug(f"Finite-difference check on {problem.kind}: rel_error={error:.3e}")
    return error
