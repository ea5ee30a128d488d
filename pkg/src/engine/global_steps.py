"""
Global updates applied once per round after the all-reduce.

Every step consumes the pseudo-gradient g_t = (x_{t,0} - x_{t,tau}) / gamma_t.
The engine passes it in as the averaged sum of applied directions, which is
the same quantity without the round trip through the parameters.
"""

import logging
from typing import Optional, Sequence

from src.core.rng import RngStream
from src.core.vectors import ParamVector
from src.engine.config import HyperConfig
from src.engine.state import GlobalState
from src.optim.base_opt import BaseOptConfig, BaseOptState, adamw_direction
from src.optim.sign_ops import apply_sign, hard_sign, majority_vote_sign, randomized_sign
from src.utils.exceptions import PreconditionError

logger = logging.getLogger(__name__)


def _require_positive(gamma: float) -> None:
    if not gamma > 0:
        raise PreconditionError("Global step needs gamma_t > 0", field="gamma_t", value=gamma, constraint="> 0")


def global_sign_step(
    state: GlobalState,
    x_avg: Optional[ParamVector],
    gamma: float,
    cfg: HyperConfig,
    rng: Optional[RngStream] = None,
    pseudo_grad: Optional[ParamVector] = None,
) -> GlobalState:
    """
    Distributed sign momentum update, in place.

        u <- beta1 m + (1 - beta1) g
        x <- x - eta gamma (S(u) + lambda x)
        m <- beta2 m + (1 - beta2) g

    x and m both use the pre-step values.
    """
    _require_positive(gamma)
    g = (state.x - x_avg) / gamma if pseudo_grad is None else pseudo_grad
    u = cfg.beta1 * state.m + (1.0 - cfg.beta1) * g
    s = apply_sign(u, cfg.sign_mode, rng)
    state.last_sign = s
    state.x = state.x - (cfg.global_lr * gamma) * (s + cfg.weight_decay * state.x)
    state.m = cfg.beta2 * state.m + (1.0 - cfg.beta2) * g
    return state


def slowmo_step(state: GlobalState, g: ParamVector, gamma: float, cfg: HyperConfig) -> GlobalState:
    """u <- beta u + g; x <- x - alpha gamma u."""
    _require_positive(gamma)
    if state.u is None:
        state.u = 0.0 * g
    state.u = cfg.slowmo.beta * state.u + g
    state.x = state.x - (cfg.slowmo.alpha * gamma) * state.u
    return state


def signed_slowmo_step(state: GlobalState, g: ParamVector, gamma: float, cfg: HyperConfig) -> GlobalState:
    """u <- beta u + ((1 - beta) / gamma) sign(Delta); x <- x - eta gamma u."""
    _require_positive(gamma)
    beta = cfg.slowmo.beta
    if state.u is None:
        state.u = 0.0 * g
    # sign(Delta) = sign(gamma g) = sign(g) for gamma > 0
    state.u = beta * state.u + ((1.0 - beta) / gamma) * hard_sign(g)
    state.x = state.x - (cfg.global_lr * gamma) * state.u
    return state


def local_avg_step(state: GlobalState, g: ParamVector, gamma: float) -> GlobalState:
    state.x = state.x - gamma * g
    return state


def global_adamw_step(state: GlobalState, g: ParamVector, cfg: HyperConfig, scale: float = 1.0) -> GlobalState:
    """AdamW on the pseudo-gradient at step eta * scale, bias-corrected by the global round count."""
    if state.opt_state is None:
        opt = BaseOptConfig(
            kind="adamw",
            beta1=cfg.beta1,
            beta2=cfg.beta2,
            weight_decay=cfg.weight_decay,
            eps=cfg.eps,
        )
        state.opt_state = BaseOptState.fresh(opt, g.shape[0])
    state.x = state.x - (cfg.global_lr * scale) * adamw_direction(state.opt_state, g, state.x)
    return state


def majority_vote_step(
    state: GlobalState,
    momenta: Sequence[ParamVector],
    cfg: HyperConfig,
    rngs: Sequence[RngStream],
    scale: float = 1.0,
) -> GlobalState:
    """x_prev <- x; x <- x - eta * scale * sign(sum_i S_r(m_i))."""
    mode = cfg.fedmv_sign_mode
    votes = [randomized_sign(m, mode, rng) for m, rng in zip(momenta, rngs)]
    state.x_prev = state.x
    state.x = state.x - (cfg.global_lr * scale) * majority_vote_sign(votes)
    return state


def centralized_momentum_step(
    state: GlobalState,
    g: ParamVector,
    gamma: float,
    cfg: HyperConfig,
    rng: Optional[RngStream] = None,
) -> GlobalState:
    """signSGD with momentum at step size eta gamma: m <- beta m + (1 - beta) g; x <- x - eta gamma S(m)."""
    state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * g
    state.x = state.x - (cfg.global_lr * gamma) * apply_sign(state.m, cfg.sign_mode, rng)
    return state
