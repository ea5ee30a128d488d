import numpy as np
import pytest

from src.core.rng import Phase, derive_stream
from src.engine.config import FedMVConfig, HyperConfig, SlowMoConfig
from src.engine.global_steps import (
    centralized_momentum_step,
    global_adamw_step,
    global_sign_step,
    local_avg_step,
    majority_vote_step,
    signed_slowmo_step,
    slowmo_step,
)
from src.engine.state import GlobalState
from src.utils.exceptions import PreconditionError


def scalar_state(x: float = 1.0) -> GlobalState:
    return GlobalState.initial(np.array([x]))


def test_sign_step_scalar_example():
    state = global_sign_step(scalar_state(), np.array([0.5]), 0.5, HyperConfig(weight_decay=0.0))
    assert state.x.tolist() == [0.5]
    assert state.m[0] == pytest.approx(0.02)


def test_sign_step_applies_decay_to_pre_step_x():
    state = global_sign_step(scalar_state(), np.array([0.5]), 0.5, HyperConfig(weight_decay=0.1))
    assert state.x[0] == pytest.approx(0.45)


def test_sign_step_fixed_point():
    state = GlobalState.initial(np.array([0.3, -2.0]))
    global_sign_step(state, state.x.copy(), 0.1, HyperConfig(weight_decay=0.0))
    assert state.x.tolist() == [0.3, -2.0]
    assert state.m.tolist() == [0.0, 0.0]


def test_sign_step_accepts_pseudo_gradient():
    a = global_sign_step(scalar_state(), np.array([0.5]), 0.5, HyperConfig(weight_decay=0.0))
    b = global_sign_step(scalar_state(), None, 0.5, HyperConfig(weight_decay=0.0), pseudo_grad=np.array([1.0]))
    assert a.x.tobytes() == b.x.tobytes()
    assert a.m.tobytes() == b.m.tobytes()


@pytest.mark.parametrize("gamma", [0.0, -0.1])
def test_sign_step_needs_positive_gamma(gamma):
    with pytest.raises(PreconditionError):
        global_sign_step(scalar_state(), np.array([0.5]), gamma, HyperConfig())


def test_slowmo_accumulates():
    cfg = HyperConfig(variant="slowmo", slowmo=SlowMoConfig(beta=0.5, alpha=2.0))
    state = scalar_state(0.0)
    slowmo_step(state, np.array([1.0]), 0.1, cfg)
    assert state.x[0] == pytest.approx(-0.2)
    slowmo_step(state, np.array([1.0]), 0.1, cfg)
    assert state.u[0] == pytest.approx(1.5)
    assert state.x[0] == pytest.approx(-0.5)


def test_signed_slowmo_moves_by_sign():
    cfg = HyperConfig(variant="signed_slowmo", global_lr=1.0, slowmo=SlowMoConfig(beta=0.5))
    state = signed_slowmo_step(scalar_state(0.0), np.array([-7.0]), 0.2, cfg)
    # eta gamma (1 - beta) / gamma
    assert state.x[0] == pytest.approx(0.5)


def test_local_avg_moves_to_average():
    assert local_avg_step(scalar_state(1.0), np.array([2.0]), 0.25).x.tolist() == [0.5]


def test_global_adamw_first_step_is_scaled():
    cfg = HyperConfig(variant="global_adamw", global_lr=0.1, beta1=0.9, beta2=0.99, weight_decay=0.0)
    state = global_adamw_step(scalar_state(0.0), np.array([2.0]), cfg, scale=0.5)
    assert state.x[0] == pytest.approx(-0.05, rel=1e-7)
    assert state.opt_state.step_count == 1


def test_majority_vote_step_when_votes_are_forced():
    cfg = HyperConfig(variant="fedmv", global_lr=0.1, fedmv=FedMVConfig(bound_B=1.0))
    rngs = [derive_stream(0, i, 0, Phase.SIGN) for i in range(3)]
    state = majority_vote_step(scalar_state(0.0), [np.array([1.0])] * 3, cfg, rngs)
    assert state.x[0] == pytest.approx(-0.1)
    assert state.x_prev.tolist() == [0.0]


def test_centralized_momentum_step():
    cfg = HyperConfig(variant="centralized_signsgd_momentum", beta1=0.5, global_lr=2.0)
    state = centralized_momentum_step(scalar_state(0.0), np.array([-3.0]), 0.1, cfg)
    assert state.m[0] == pytest.approx(-1.5)
    assert state.x[0] == pytest.approx(0.2)
