import numpy as np
import pytest

from src.core.rng import Phase, derive_stream
from src.engine.simulator import run
from src.problems.factory import ProblemSpec, make_problem
from src.problems.quadratic import QuadraticProblem
from src.theory.constants import (
    estimate_constants,
    estimate_delta,
    estimate_sigma,
    estimate_smoothness,
    estimate_zeta,
    power_iteration,
)
from src.utils.exceptions import PreconditionError


def test_smoothness_of_diagonal_quadratic():
    problem = QuadraticProblem(np.diag([1.0, 4.0]), [np.zeros(2)])
    rng = derive_stream(0, 0, 0, Phase.ESTIMATE)
    assert estimate_smoothness(problem, [problem.x0], rng) == pytest.approx(4.0, rel=1e-8)


def test_power_iteration_of_zero_map():
    assert power_iteration(lambda v: 0.0 * v, 3, derive_stream(0, 0, 0, Phase.ESTIMATE)) == 0.0


def test_smoothness_of_logistic_is_below_closed_form_bound():
    problem = make_problem(ProblemSpec(kind="logistic", dim=4, samples_per_worker=64), 2)
    rng = derive_stream(0, 0, 0, Phase.ESTIMATE)
    estimate = estimate_smoothness(problem, [problem.x0], rng)
    assert 0 < estimate <= problem.smoothness_upper_bound() * (1 + 1e-4)


def test_homogeneous_quadratic_has_zero_delta():
    b = np.array([0.5, -0.5, 1.0])
    problem = QuadraticProblem(np.eye(3), [b, b])
    assert estimate_delta(problem, [problem.x0]) == 0.0


def test_noise_deviation_concentrates():
    problem = QuadraticProblem(np.eye(4), [np.zeros(4)], noise_sigma=0.1)
    sigma = estimate_sigma(problem, [problem.x0], draws=100_000, seed=3)
    assert 0.095 <= sigma <= 0.105


def test_averaged_noise_shrinks_with_worker_count():
    sigma = 0.2
    problem = QuadraticProblem(np.eye(4), [np.zeros(4), np.ones(4), -np.ones(4), np.full(4, 0.5)], noise_sigma=sigma)
    zeta = estimate_zeta(problem, [problem.x0], draws=20_000, seed=7)
    assert zeta**2 == pytest.approx(sigma**2 / problem.n_workers, rel=0.05)


def test_estimates_are_deterministic(make_config, make_quadratic_problem):
    problem = make_quadratic_problem()
    trace = run(make_config(rounds=10), problem)
    a = estimate_constants(trace, problem, sample_budget=200, seed=4)
    b = estimate_constants(trace, problem, sample_budget=200, seed=4)
    assert a == b
    assert a.R == trace.max_dir_norm
    assert (a.n, a.tau, a.T, a.d) == (4, 4, 10, 8)
    assert a.L == pytest.approx(1.0, rel=1e-8)
    assert a.f0_minus_fstar > 0


def test_estimation_needs_budget(make_config, make_quadratic_problem):
    problem = make_quadratic_problem()
    trace = run(make_config(rounds=2), problem)
    with pytest.raises(PreconditionError):
        estimate_constants(trace, problem, sample_budget=0)
