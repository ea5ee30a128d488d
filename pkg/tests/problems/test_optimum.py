import numpy as np
import pytest

from src.problems.factory import ProblemSpec, make_problem
from src.problems.optimum import f_star, get_solver


def test_solver_is_a_singleton():
    assert get_solver() is get_solver()


def test_quadratic_optimum_is_closed_form(identity_quadratic):
    # f(1) = 1/2 * 1/2 * (1 + 1)
    assert f_star(identity_quadratic) == pytest.approx(0.5)


def test_logistic_optimum_has_vanishing_gradient():
    problem = make_problem(ProblemSpec(kind="logistic", dim=5, reg=0.01, samples_per_worker=64, heterogeneity=0.3), 3)
    value = f_star(problem)
    assert value <= problem.loss(problem.x0)
    assert value <= problem.loss(np.zeros(5)) + 1e-12
    # memoized
    assert f_star(problem) == value


def test_mlp_reference_improves_on_start():
    problem = make_problem(ProblemSpec(kind="mlp", dim=2, hidden_units=3, samples_per_worker=16, noise_sigma=0.05), 2)
    assert f_star(problem, budget=50) < problem.loss(problem.x0)
