import numpy as np
import pytest

from src.core.rng import Phase, derive_stream
from src.core.schedules import Schedule
from src.engine.config import HyperConfig
from src.optim.base_opt import BaseOptConfig
from src.problems.factory import ProblemSpec, make_problem
from src.problems.quadratic import QuadraticProblem


@pytest.fixture
def rng():
    return derive_stream(1234, 0, 0, Phase.LOCAL)


@pytest.fixture
def identity_quadratic():
    """A = I on two workers with centers 0 and 2 (mean 1), no noise."""
    return QuadraticProblem(np.eye(1), [np.array([0.0]), np.array([2.0])], noise_sigma=0.0)


@pytest.fixture
def make_quadratic_problem():
    def factory(n=4, dim=8, noise_sigma=0.5, heterogeneity=0.5, structural_seed=5, **kwargs):
        spec = ProblemSpec(
            kind="quadratic",
            dim=dim,
            noise_sigma=noise_sigma,
            heterogeneity=heterogeneity,
            structural_seed=structural_seed,
            **kwargs,
        )
        return make_problem(spec, n)
    return factory


@pytest.fixture
def make_config():
    """HyperConfig with small SGD defaults; keyword arguments override any field."""
    def factory(**overrides):
        base = dict(
            variant="dsm",
            n=4,
            tau=4,
            rounds=20,
            local_lr=Schedule(peak=0.05),
            weight_decay=0.0,
            base_opt=BaseOptConfig(kind="sgd"),
            seed=0,
        )
        base.update(overrides)
        return HyperConfig(**base)
    return factory
