import numpy as np
import pytest

from src.core.schedules import Schedule
from src.engine.config import SignConfig
from src.engine.simulator import run
from src.theory.invariants import momentum_bound_ratio, virtual_iterate_residual
from src.utils.exceptions import PreconditionError

DIRECTION_BOUND = 5.0
ETA, BETA = 0.5, 0.9


@pytest.fixture
def instrumented_trace(make_config, make_quadratic_problem):
    cfg = make_config(
        rounds=50,
        tau=8,
        beta1=BETA,
        beta2=BETA,
        global_lr=ETA,
        instrument=True,
        sign=SignConfig(variant="randomized_bipolar", direction_bound=DIRECTION_BOUND),
    )
    return run(cfg, make_quadratic_problem(noise_sigma=0.5))


def residual(trace, **kw):
    return virtual_iterate_residual(trace, eta=ETA, beta=BETA, R=DIRECTION_BOUND, **kw)


def test_virtual_iterates_follow_their_recursion(instrumented_trace):
    assert len(instrumented_trace.debug) == 50
    assert all(rec.sign is not None for rec in instrumented_trace.debug)
    assert residual(instrumented_trace) < 1e-10


def test_virtual_iterates_with_cosine_schedule_and_decay(make_config, make_quadratic_problem):
    cfg = make_config(
        rounds=30,
        tau=4,
        beta1=BETA,
        beta2=BETA,
        global_lr=ETA,
        weight_decay=0.1,
        local_lr=Schedule(kind="cosine", peak=0.05, warmup_steps=5, total_steps=30),
        instrument=True,
        sign=SignConfig(variant="randomized_sparse", direction_bound=DIRECTION_BOUND),
    )
    trace = run(cfg, make_quadratic_problem())
    # round 0 has gamma 0 and skips the global step
    assert trace.debug[0].sign is None
    assert residual(trace, weight_decay=0.1) < 1e-10
    assert residual(trace, weight_decay=0.0) > 1e-8


def test_shifted_iterate_breaks_the_recursion(instrumented_trace):
    rec = instrumented_trace.debug[10]
    rec.x = rec.x + 1e-3
    assert residual(instrumented_trace) > 1e-6


def test_corrupted_momentum_breaks_the_recursion(instrumented_trace):
    rec = instrumented_trace.debug[20]
    rec.m = -7.0 * rec.m + 3.0
    assert residual(instrumented_trace) > 1e-3


def test_flipped_sign_breaks_the_recursion(instrumented_trace):
    rec = instrumented_trace.debug[30]
    rec.sign = -rec.sign
    assert residual(instrumented_trace) > 1e-6


def test_noisy_iterates_break_the_recursion(instrumented_trace):
    noise = np.random.default_rng(0)
    for rec in instrumented_trace.debug:
        rec.x = rec.x + 1e3 * noise.standard_normal(rec.x.shape[0])
    assert residual(instrumented_trace) > 1e-3


def test_virtual_iterates_need_debug_stream(make_config, make_quadratic_problem):
    trace = run(make_config(rounds=3), make_quadratic_problem())
    with pytest.raises(PreconditionError):
        virtual_iterate_residual(trace, eta=1.0, beta=0.5, R=1.0)


def test_virtual_iterates_need_a_global_step(make_config, make_quadratic_problem):
    trace = run(make_config(rounds=1, instrument=True), make_quadratic_problem())
    with pytest.raises(PreconditionError):
        virtual_iterate_residual(trace, eta=1.0, beta=0.5, R=1.0)


@pytest.mark.parametrize("beta, R", [(1.0, 1.0), (0.5, 0.0)])
def test_virtual_iterates_reject_bad_parameters(instrumented_trace, beta, R):
    with pytest.raises(PreconditionError):
        virtual_iterate_residual(instrumented_trace, eta=1.0, beta=beta, R=R)


def test_momentum_ratio_of_instrumented_run(instrumented_trace):
    assert 0 < momentum_bound_ratio(instrumented_trace) <= 1.0 + 1e-12
