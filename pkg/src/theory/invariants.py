"""Runtime checks of identities used in the convergence analysis."""

import logging

import numpy as np

from src.core.vectors import ParamVector, norm_l2
from src.engine.config import HyperConfig
from src.engine.trace import DebugRound, RunTrace
from src.utils.exceptions import PreconditionError

logger = logging.getLogger(__name__)


def momentum_bound_ratio(trace: RunTrace) -> float:
    """max_t ||m_t|| / (tau R-hat); at most 1 up to rounding when every ||d|| <= R-hat."""
    tau = HyperConfig.model_validate(trace.config).tau
    bound = tau * trace.max_dir_norm
    if bound == 0.0:
        return 0.0 if trace.max_momentum_norm == 0.0 else float("inf")
    return trace.max_momentum_norm / bound


def _virtual_iterate(rec: DebugRound, k: int, scale: float, beta: float) -> ParamVector:
    prefix = rec.avg_directions[:k].sum(axis=0) if k > 0 else np.zeros_like(rec.x)
    return rec.x - scale / (1.0 - beta) * (beta * rec.m + (1.0 - beta) * prefix)


def _relative(a: ParamVector, b: ParamVector) -> float:
    return norm_l2(a - b) / max(norm_l2(a), norm_l2(b), 1e-300)


def virtual_iterate_residual(
    trace: RunTrace, eta: float, beta: float, R: float, weight_decay: float = 0.0
) -> float:
    """
    Max relative error of the virtual-iterate recursions on an instrumented dsm trace
    with beta1 = beta2 = beta.

        y_{t,k} = x_{t,0} - c_t / (1 - beta) [beta m_t + (1 - beta) sum_{i<k} d_{t,i}],
        c_t = eta gamma_t / (tau R)

    Within a round y_{t,k+1} = y_{t,k} - c_t d_{t,k}. Across rounds

        y_{t+1,0} - y_{t,tau} = -eta gamma_t (S(m_{t+1}) + lambda x_{t,0})
                                + (c_t - beta c_{t+1}) / (1 - beta) m_{t+1}

    which ties the recorded x, m and sign of consecutive rounds to each other.
    """
    if not trace.debug:
        raise PreconditionError("Trace has no debug rounds; run with instrument = true", field="instrument")
    if not 0 <= beta < 1:
        raise PreconditionError("Virtual iterates need beta in [0, 1)", field="beta", value=beta)
    if R <= 0:
        raise PreconditionError("Virtual iterates need R > 0", field="R", value=R)
    worst = 0.0
    for rec in trace.debug:
        tau = rec.avg_directions.shape[0]
        scale = eta * rec.gamma / (tau * R)
        for k in range(tau):
            expected = _virtual_iterate(rec, k, scale, beta) - scale * rec.avg_directions[k]
            worst = max(worst, _relative(_virtual_iterate(rec, k + 1, scale, beta), expected))

    steps = 0
    for rec, nxt in zip(trace.debug, trace.debug[1:]):
        if rec.sign is None or nxt.round != rec.round + 1:
            continue
        tau = rec.avg_directions.shape[0]
        c_t = eta * rec.gamma / (tau * R)
        c_next = eta * nxt.gamma / (tau * R)
        y_end = _virtual_iterate(rec, tau, c_t, beta)
        y_next = _virtual_iterate(nxt, 0, c_next, beta)
        expected = (
            y_end
            - eta * rec.gamma * (rec.sign + weight_decay * rec.x)
            + (c_t - beta * c_next) / (1.0 - beta) * nxt.m
        )
        worst = max(worst, _relative(y_next, expected))
        steps += 1
    if steps == 0:
        raise PreconditionError("No consecutive rounds with a recorded global sign step", field="debug")
    logger.debug(f"virtual iterate residual {worst:.3e} over {len(trace.debug)} rounds, {steps} global steps")
    return worst
