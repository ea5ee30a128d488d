import numpy as np
import pytest

from src.problems.checks import finite_difference_check, heterogeneity_delta_sq
from src.problems.factory import ProblemSpec, make_problem
from src.utils.exceptions import PreconditionError, UnsupportedProblemError

POINTS = 20


def _points(problem, seed):
    rng = np.random.default_rng(seed)
    return [problem.x0 + 0.5 * rng.standard_normal(problem.dim) for _ in range(POINTS)]


def test_quadratic_gradient_is_exact(make_quadratic_problem):
    problem = make_quadratic_problem(dim=6)
    for x in _points(problem, 0):
        assert finite_difference_check(problem, x, h=1e-5) < 1e-8


@pytest.mark.parametrize(
    "spec",
    [
        ProblemSpec(kind="logistic", dim=6, heterogeneity=0.5, samples_per_worker=32),
        ProblemSpec(kind="mlp", dim=3, hidden_units=4, samples_per_worker=16, noise_sigma=0.1),
    ],
    ids=["logistic", "mlp"],
)
def test_sample_based_gradients_match_finite_differences(spec):
    problem = make_problem(spec, 2)
    for x in _points(problem, 1):
        assert finite_difference_check(problem, x, h=1e-5) < 1e-5


def test_step_must_be_positive(make_quadratic_problem):
    with pytest.raises(PreconditionError):
        finite_difference_check(make_quadratic_problem(), np.zeros(8), h=0.0)


def test_heterogeneity_is_quadratic_only():
    problem = make_problem(ProblemSpec(kind="logistic", dim=4, samples_per_worker=8), 2)
    with pytest.raises(UnsupportedProblemError) as err:
        heterogeneity_delta_sq(problem)
    assert err.value.exit_code == 1
