"""
Local phase: tau base-optimizer steps per worker, then exact averaging.

Workers only touch their own state and their own stream, so running them on
a joblib thread pool gives bitwise the same result as running them in order.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed  # type: ignore

from src.core.vectors import ParamVector, ensure_finite, mean_vectors, norm_l2
from src.engine.state import WorkerState
from src.optim.base_opt import direction
from src.problems.base import Problem

logger = logging.getLogger(__name__)


@dataclass
class LocalOutcome:
    worker_id: int
    x_final: ParamVector
    dir_sum: ParamVector
    max_dir_norm: float
    # tau x d arrays, only when recording
    iterates: Optional[np.ndarray] = None
    directions: Optional[np.ndarray] = None


def run_worker(
    worker: WorkerState,
    problem: Problem,
    gamma: float,
    tau: int,
    round_index: int,
    record: bool = False,
) -> LocalOutcome:
    x = worker.x_local
    dim = x.shape[0]
    iterates = np.empty((tau, dim)) if record else None
    directions = np.empty((tau, dim)) if record else None
    max_norm = 0.0
    for k in range(tau):
        if record:
            iterates[k] = x
        g = problem.stochastic_grad(worker.worker_id, x, worker.rng)
        d = direction(worker.base_state, g, x)
        max_norm = max(max_norm, norm_l2(d))
        if record:
            directions[k] = d
        x = x - gamma * d
        worker.dir_sum += d
    worker.x_local = ensure_finite(x, round_index, what=f"worker {worker.worker_id} parameters")
    return LocalOutcome(
        worker_id=worker.worker_id,
        x_final=worker.x_local,
        dir_sum=worker.dir_sum,
        max_dir_norm=max_norm,
        iterates=iterates,
        directions=directions,
    )


def local_phase(
    workers: Sequence[WorkerState],
    problem: Problem,
    gamma: float,
    tau: int,
    round_index: int = 0,
    record: bool = False,
) -> List[LocalOutcome]:
    """Run every worker's tau local steps in worker order."""
    return [run_worker(w, problem, gamma, tau, round_index, record) for w in workers]


def parallel_round(
    workers: Sequence[WorkerState],
    problem: Problem,
    gamma: float,
    tau: int,
    round_index: int = 0,
    record: bool = False,
    parallel: Optional[Parallel] = None,
    jobs: int = 2,
) -> List[LocalOutcome]:
    """Same contract as local_phase with workers running concurrently on threads."""
    if len(workers) == 1:
        return local_phase(workers, problem, gamma, tau, round_index, record)
    if parallel is None:
        parallel = Parallel(n_jobs=jobs, backend="threading")
    # joblib keeps submission order in its result list
    return list(parallel(delayed(run_worker)(w, problem, gamma, tau, round_index, record) for w in workers))


def all_reduce_mean(xs: Sequence[ParamVector]) -> ParamVector:
    """Componentwise mean in worker order; empty input is an error."""
    return mean_vectors(list(xs))
