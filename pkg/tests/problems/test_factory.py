import numpy as np
import pytest
from pydantic import ValidationError

from src.problems.factory import ProblemSpec, make_problem


@pytest.mark.parametrize("kind", ["quadratic", "logistic", "mlp"])
def test_same_spec_builds_identical_problems(kind):
    spec = ProblemSpec(kind=kind, dim=4, samples_per_worker=16, heterogeneity=0.2, structural_seed=3)
    a, b = make_problem(spec, 2), make_problem(spec, 2)
    assert np.array_equal(a.x0, b.x0)
    assert a.loss(a.x0) == b.loss(b.x0)


def test_structural_seed_changes_problem():
    a = make_problem(ProblemSpec(structural_seed=1), 2)
    b = make_problem(ProblemSpec(structural_seed=2), 2)
    assert not np.array_equal(a.x0, b.x0)


def test_unknown_keys_and_bad_ranges_are_rejected():
    with pytest.raises(ValidationError):
        ProblemSpec(kind="quadratic", dimm=4)
    with pytest.raises(ValidationError):
        ProblemSpec(curvature_min=2.0, curvature_max=1.0)
    with pytest.raises(ValidationError):
        ProblemSpec(kind="logistic", delta_sq=1.0)
