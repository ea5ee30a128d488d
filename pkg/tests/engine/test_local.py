import numpy as np
import pytest

from src.core.rng import Phase, derive_stream
from src.engine.local import all_reduce_mean, local_phase, parallel_round
from src.engine.state import WorkerState
from src.optim.base_opt import BaseOptConfig, BaseOptState
from src.problems.quadratic import QuadraticProblem
from src.utils.exceptions import NumericalAbortError, PreconditionError


def workers_at(x, n, dim=1, kind="sgd", round_index=0):
    workers = []
    for i in range(n):
        w = WorkerState(i, x.copy(), BaseOptState.fresh(BaseOptConfig(kind=kind), dim))
        w.synchronize(x, derive_stream(0, i, round_index, Phase.LOCAL))
        workers.append(w)
    return workers


def test_single_sgd_step():
    problem = QuadraticProblem(np.eye(1), [np.array([0.0])])
    out = local_phase(workers_at(np.array([1.0]), 1), problem, 0.5, 1)
    assert out[0].x_final.tolist() == [0.5]
    assert out[0].dir_sum.tolist() == [1.0]


def test_zero_rate_leaves_workers_in_place(make_quadratic_problem):
    problem = make_quadratic_problem(n=3)
    outcomes = local_phase(workers_at(problem.x0, 3, problem.dim), problem, 0.0, 5)
    for o in outcomes:
        assert o.x_final.tobytes() == problem.x0.tobytes()


def test_homogeneous_noiseless_workers_agree(make_quadratic_problem):
    problem = make_quadratic_problem(n=4, noise_sigma=0.0, heterogeneity=0.0)
    outcomes = local_phase(workers_at(problem.x0, 4, problem.dim, kind="adamw"), problem, 0.05, 6)
    for o in outcomes[1:]:
        assert o.x_final.tobytes() == outcomes[0].x_final.tobytes()


def test_threads_match_sequential(make_quadratic_problem):
    problem = make_quadratic_problem(n=16)
    seq = local_phase(workers_at(problem.x0, 16, problem.dim), problem, 0.05, 12, record=True)
    par = parallel_round(workers_at(problem.x0, 16, problem.dim), problem, 0.05, 12, record=True, jobs=4)
    assert [o.worker_id for o in par] == list(range(16))
    for a, b in zip(seq, par):
        assert a.x_final.tobytes() == b.x_final.tobytes()
        assert np.array_equal(a.directions, b.directions)


def test_divergence_aborts_with_round():
    problem = QuadraticProblem(np.eye(1), [np.array([0.0])])
    with pytest.raises(NumericalAbortError) as err:
        with np.errstate(over="ignore", invalid="ignore"):
            local_phase(workers_at(np.array([1e300]), 1, round_index=7), problem, 1e10, 3, round_index=7)
    assert err.value.round_index == 7


def test_all_reduce_mean():
    v = np.array([0.1, 0.2, 0.3])
    assert all_reduce_mean([v, v, v]).tobytes() == v.tobytes()
    assert all_reduce_mean([np.array([0.0]), np.array([2.0])]).tolist() == [1.0]
    with pytest.raises(PreconditionError):
        all_reduce_mean([])
