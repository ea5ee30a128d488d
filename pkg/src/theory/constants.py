"""
Assumption constants, either declared or estimated from a run.

estimate_constants reads R-hat off the trace and measures everything else
on the problem at points sampled from the trace, so its output depends
only on (trace, problem, sample_budget, seed).
"""

import logging
import math
from typing import Callable, List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.core.rng import GLOBAL_WORKER, Phase, RngStream, derive_stream
from src.core.vectors import ParamVector, mean_vectors, norm_l2_sq
from src.engine.config import HyperConfig
from src.engine.trace import RunTrace
from src.problems.base import Problem
from src.problems.optimum import f_star
from src.problems.quadratic import QuadraticProblem
from src.utils.exceptions import PreconditionError

logger = logging.getLogger(__name__)

POWER_TOL = 1e-10
POWER_MAX_ITER = 5000
HVP_STEP = 1e-5
MAX_SAMPLE_POINTS = 4


class TheoremConstants(BaseModel):
    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {
                "L": 1.0, "R": 1.0, "sigma": 1.0, "zeta": 1.0, "delta": 1.0,
                "n": 1, "tau": 1, "T": 100, "eta": 1.0, "gamma": 1.0, "beta": 0.0,
                "d": 2, "f0_minus_fstar": 1.0,
            }
        },
    )

    L: float = Field(..., ge=0, description="Smoothness of every f_i")
    R: float = Field(..., ge=0, description="Bound on every local direction norm")
    sigma: float = Field(0.0, ge=0, description="Per-worker stochastic gradient deviation")
    zeta: float = Field(0.0, ge=0, description="Deviation of the worker-averaged direction")
    delta: float = Field(0.0, ge=0, description="Gradient heterogeneity across workers")
    n: int = Field(1, ge=1)
    tau: int = Field(1, ge=1)
    T: int = Field(1, ge=1)
    eta: float = Field(1.0, gt=0, description="Global learning rate")
    gamma: float = Field(0.0, ge=0, description="Local learning rate")
    beta: float = Field(0.0, ge=0, le=1, description="Momentum coefficient beta1 = beta2")
    d: int = Field(1, ge=1, description="Dimension")
    f0_minus_fstar: float = Field(0.0, ge=0, description="f(x_{0,0}) - f_*")


def power_iteration(apply: Callable[[ParamVector], ParamVector], dim: int, rng: RngStream) -> float:
    """Largest |eigenvalue| of a symmetric linear map, to relative tolerance POWER_TOL."""
    v = rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(POWER_MAX_ITER):
        w = apply(v)
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            return 0.0
        v = w / norm
        if abs(norm - estimate) <= POWER_TOL * norm:
            return norm
        estimate = norm
    logger.warning(f"Power iteration stopped after {POWER_MAX_ITER} iterations at {estimate:.10g}")
    return estimate


def _hessian_vector(problem: Problem, x: ParamVector) -> Callable[[ParamVector], ParamVector]:
    def apply(v: ParamVector) -> ParamVector:
        return (problem.full_grad(x + HVP_STEP * v) - problem.full_grad(x - HVP_STEP * v)) / (2.0 * HVP_STEP)
    return apply


def estimate_smoothness(problem: Problem, points: List[ParamVector], rng: RngStream) -> float:
    if isinstance(problem, QuadraticProblem):
        return power_iteration(lambda v: problem.A @ v, problem.dim, rng)
    return max(power_iteration(_hessian_vector(problem, x), problem.dim, rng) for x in points)


def _sample_points(trace: RunTrace, problem: Problem, rng: RngStream) -> List[ParamVector]:
    if trace.snapshots:
        candidates = trace.snapshots
    else:
        candidates = [problem.x0] + ([trace.x_final] if trace.x_final is not None else [])
    if len(candidates) <= MAX_SAMPLE_POINTS:
        return list(candidates)
    picks = sorted(rng.generator.choice(len(candidates), size=MAX_SAMPLE_POINTS, replace=False))
    return [candidates[i] for i in picks]


def estimate_sigma(problem: Problem, points: List[ParamVector], draws: int, seed: int) -> float:
    """max_i of E||grad f_i(x, xi) - grad f_i(x)||^2 over the points, as a deviation."""
    worst = 0.0
    per_point = max(1, draws // len(points))
    for p, x in enumerate(points):
        for i in range(problem.n_workers):
            rng = derive_stream(seed, i, p, Phase.ESTIMATE)
            exact = problem.local_grad(i, x)
            total = math.fsum(
                norm_l2_sq(problem.stochastic_grad(i, x, rng) - exact) for _ in range(per_point)
            )
            worst = max(worst, total / per_point)
    return math.sqrt(worst)


def estimate_zeta(problem: Problem, points: List[ParamVector], draws: int, seed: int) -> float:
    """Deviation of d = (1/n) sum_i grad f_i(x, xi_i) from its mean grad f(x)."""
    worst = 0.0
    per_point = max(1, draws // len(points))
    for p, x in enumerate(points):
        rngs = [derive_stream(seed, i, len(points) + p, Phase.ESTIMATE) for i in range(problem.n_workers)]
        exact = problem.full_grad(x)
        total = 0.0
        for _ in range(per_point):
            d = mean_vectors([problem.stochastic_grad(i, x, rngs[i]) for i in range(problem.n_workers)])
            total += norm_l2_sq(d - exact)
        worst = max(worst, total / per_point)
    return math.sqrt(worst)


def estimate_delta(problem: Problem, points: List[ParamVector]) -> float:
    if isinstance(problem, QuadraticProblem):
        return math.sqrt(problem.heterogeneity_delta_sq())
    worst = 0.0
    for x in points:
        g = problem.full_grad(x)
        spread = np.mean([norm_l2_sq(g - problem.local_grad(i, x)) for i in range(problem.n_workers)])
        worst = max(worst, float(spread))
    return math.sqrt(worst)


def estimate_constants(
    trace: RunTrace,
    problem: Problem,
    sample_budget: int = 10_000,
    seed: int = 0,
) -> TheoremConstants:
    """
    Measure the theorem constants for `trace` on `problem`.

    Args:
        trace: A finished run; supplies R-hat, n, tau, T and the rates
        problem: The problem the run was simulated on
        sample_budget: Stochastic oracle calls per worker for each Monte Carlo estimate
        seed: Seed of the estimation streams

    Returns:
        TheoremConstants with L, R, sigma, zeta, delta and f0 - f_* filled in
    """
    if not trace.records:
        raise PreconditionError("Cannot estimate constants from an empty trace", field="trace")
    if sample_budget < 1:
        raise PreconditionError("sample_budget must be positive", field="sample_budget", value=sample_budget)
    cfg = HyperConfig.model_validate(trace.config)
    rng = derive_stream(seed, GLOBAL_WORKER, 0, Phase.ESTIMATE)
    points = _sample_points(trace, problem, rng)

    L = estimate_smoothness(problem, points, rng)
    sigma = estimate_sigma(problem, points, sample_budget, seed)
    zeta = estimate_zeta(problem, points, sample_budget, seed)
    delta = estimate_delta(problem, points)
    gap = max(0.0, trace.records[0].loss - f_star(problem, budget=cfg.rounds))
    constants = TheoremConstants(
        L=L,
        R=trace.max_dir_norm,
        sigma=sigma,
        zeta=zeta,
        delta=delta,
        n=cfg.n,
        tau=cfg.tau,
        T=cfg.rounds,
        eta=cfg.global_lr,
        gamma=cfg.local_lr.peak,
        beta=cfg.beta1,
        d=problem.dim,
        f0_minus_fstar=gap,
    )
    logger.debug(f"Estimated constants {constants.model_dump()}")
    return constants
