"""
Reference optimum values f_* used to normalize suboptimality gaps.

The quadratic family has a closed form. For the logistic family the minimizer
comes from scikit-learn's lbfgs solver at tight tolerance; for the MLP family
f_* is approximated by a long full-batch AdamW run. Both are expensive, so
results are memoized per problem in-process and, when DSM_CACHE_DIR is set,
on disk through joblib.Memory.
"""

import logging
import math
from threading import Lock
from typing import Dict, List, Optional

import joblib  # type: ignore
import numpy as np
from sklearn.linear_model import LogisticRegression

from src.core.schedules import Schedule, learning_rate
from src.optim.base_opt import BaseOptConfig, BaseOptState, adamw_direction
from src.problems.base import Problem
from src.problems.logistic import LogisticProblem
from src.problems.mlp import MlpProblem
from src.problems.quadratic import QuadraticProblem
from src.utils.exceptions import UnsupportedProblemError
from src.utils.settings import get_settings

logger = logging.getLogger(__name__)

# Length of the MLP reference run relative to the caller's round budget.
REFERENCE_BUDGET_FACTOR = 10


def _logistic_minimizer(
    features: List[np.ndarray], labels: List[np.ndarray], reg: float
) -> np.ndarray:
    n = len(features)
    weights = np.concatenate([np.full(a.shape[0], 1.0 / (n * a.shape[0])) for a in features])
    solver = LogisticRegression(
        penalty="l2" if reg > 0 else None,
        C=1.0 / reg if reg > 0 else 1.0,
        fit_intercept=False,
        solver="lbfgs",
        tol=1e-10,
        max_iter=10000,
    )
    solver.fit(np.vstack(features), np.concatenate(labels), sample_weight=weights)
    return solver.coef_.reshape(-1).astype(np.float64)


def _mlp_reference_run(
    inputs: List[np.ndarray],
    targets: List[np.ndarray],
    hidden_units: int,
    x0: np.ndarray,
    steps: int,
    peak_lr: float,
) -> float:
    problem = MlpProblem(inputs, targets, hidden_units, x0=x0)
    state = BaseOptState.fresh(BaseOptConfig(kind="adamw", weight_decay=0.0), problem.dim)
    schedule = Schedule(kind="cosine", peak=peak_lr, warmup_steps=steps // 20, total_steps=steps, floor_fraction=0.01)
    x = problem.x0
    best = problem.loss(x)
    for step in range(steps):
        x = x - learning_rate(step, schedule) * adamw_direction(state, problem.full_grad(x), x)
        if step % 100 == 99 or step == steps - 1:
            best = min(best, problem.loss(x))
    return best


class OptimumSolver:
    """
    Singleton computing and memoizing f_* per problem.

    Attributes:
        _instance: Singleton instance
        _lock: Guards initialization and the in-process memo
        _memory: joblib.Memory bound to DSM_CACHE_DIR (no-op when unset)
        _values: In-process memo keyed by joblib.hash of the problem data
    """

    _instance: Optional["OptimumSolver"] = None
    _lock: Lock = Lock()

    def __new__(cls):
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
                    cls._instance._initialized = False
        return cls._instance

    def __init__(self):
        if self._initialized:
            return
        cache_dir = get_settings().cache_dir
        self._memory = joblib.Memory(location=cache_dir, verbose=0)
        self._logistic = self._memory.cache(_logistic_minimizer)
        self._mlp = self._memory.cache(_mlp_reference_run)
        self._values: Dict[str, float] = {}
        self._initialized = True
        logger.info(f"OptimumSolver created (cache_dir={cache_dir or 'none'})")

    def f_star(self, problem: Problem, budget: int = 2000) -> float:
        """Reference optimum value of `problem`; `budget` sizes the MLP reference run."""
        if isinstance(problem, QuadraticProblem):
            return problem.optimum_value()

        key = joblib.hash((problem.kind, problem.describe(), self._payload(problem), budget))
        with self._lock:
            if key in self._values:
                return self._values[key]

        if isinstance(problem, LogisticProblem):
            w = self._logistic(problem.features, problem.labels, problem.reg)
            value = min(problem.loss(w), problem.loss(problem.x0))
        elif isinstance(problem, MlpProblem):
            steps = REFERENCE_BUDGET_FACTOR * budget
            value = self._mlp(problem.inputs, problem.targets, problem.hidden_units, problem.x0, steps, 1e-2)
        else:
            raise UnsupportedProblemError("f_star", problem.kind, reason="no reference solver for this family")

        if not math.isfinite(value):
            raise UnsupportedProblemError("f_star", problem.kind, reason="reference solver diverged")
        logger.debug(f"f_star({problem.kind}) = {value:.10g}")
        with self._lock:
            self._values[key] = value
        return value

    @staticmethod
    def _payload(problem: Problem):
        if isinstance(problem, LogisticProblem):
            return problem.features, problem.labels
        if isinstance(problem, MlpProblem):
            return problem.inputs, problem.targets, problem.x0
        return None

    @classmethod
    def get_instance(cls) -> "OptimumSolver":
        return cls()


def get_solver() -> OptimumSolver:
    return OptimumSolver.get_instance()


def f_star(problem: Problem, budget: int = 2000) -> float:
    return get_solver().f_star(problem, budget)
