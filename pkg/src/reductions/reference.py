"""
Straight-line reference optimizers.

These loops replay a recorded direction stream with the textbook
recursions. They deliberately share nothing with the simulation engine
except numpy arithmetic, so agreement between the two is evidence rather
than tautology.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Literal

import numpy as np

from src.core.vectors import ParamVector
from src.utils.exceptions import PreconditionError, StreamExhaustedError

logger = logging.getLogger(__name__)

ReferenceKind = Literal["signsgd_mom", "lion", "lookahead", "signed_lookahead"]


@dataclass
class GradientStream:
    """directions[s] is the s-th direction consumed; gammas[s] the local rate at that step."""

    directions: np.ndarray
    gammas: np.ndarray

    def __len__(self) -> int:
        return self.directions.shape[0]


@dataclass
class ReferenceLoop:
    kind: ReferenceKind
    x0: ParamVector
    lr: float = 1.0
    beta1: float = 0.9
    beta2: float = 0.9
    weight_decay: float = 0.0
    tau: int = 1


@dataclass
class ReplayResult:
    x_final: ParamVector
    # outer iterates, starting with x0
    trajectory: List[ParamVector] = field(default_factory=list)
    # every inner iterate of the lookahead kinds
    fast_trajectory: List[ParamVector] = field(default_factory=list)


def _sign(v: ParamVector) -> ParamVector:
    return np.sign(v) + 0.0


def _signsgd_mom(ref: ReferenceLoop, stream: GradientStream, steps: int) -> ReplayResult:
    # x_{s+1} = x_s - lr_s sign(m_{s+1}),  m_{s+1} = beta m_s + (1 - beta) g_s
    x = ref.x0.copy()
    m = np.zeros_like(x)
    out = ReplayResult(x_final=x, trajectory=[x.copy()])
    for s in range(steps):
        gamma = float(stream.gammas[s])
        if gamma > 0:
            m = ref.beta1 * m + (1.0 - ref.beta1) * stream.directions[s]
            x = x - (ref.lr * gamma) * _sign(m)
        out.trajectory.append(x.copy())
    out.x_final = x
    return out


def _lion(ref: ReferenceLoop, stream: GradientStream, steps: int) -> ReplayResult:
    x = ref.x0.copy()
    m = np.zeros_like(x)
    out = ReplayResult(x_final=x, trajectory=[x.copy()])
    for s in range(steps):
        gamma = float(stream.gammas[s])
        if gamma > 0:
            g = stream.directions[s]
            u = ref.beta1 * m + (1.0 - ref.beta1) * g
            x = x - (ref.lr * gamma) * (_sign(u) + ref.weight_decay * x)
            m = ref.beta2 * m + (1.0 - ref.beta2) * g
        out.trajectory.append(x.copy())
    out.x_final = x
    return out


def _lookahead(ref: ReferenceLoop, stream: GradientStream, steps: int, signed: bool) -> ReplayResult:
    if steps % ref.tau != 0:
        raise PreconditionError(
            "Lookahead replays whole rounds", field="steps", value=steps, constraint=f"multiple of {ref.tau}"
        )
    x = ref.x0.copy()
    m = np.zeros_like(x)
    out = ReplayResult(x_final=x, trajectory=[x.copy()], fast_trajectory=[x.copy()])
    for t in range(steps // ref.tau):
        fast = x.copy()
        displacement = np.zeros_like(x)
        gamma = float(stream.gammas[t * ref.tau])
        for k in range(ref.tau):
            d = stream.directions[t * ref.tau + k]
            fast = fast - gamma * d
            displacement += d
            out.fast_trajectory.append(fast.copy())
        if gamma > 0:
            u = ref.beta1 * m + (1.0 - ref.beta1) * displacement
            if signed:
                x = x - (ref.lr * gamma) * (_sign(u) + ref.weight_decay * x)
            else:
                x = x - (ref.lr * gamma) * u
            m = ref.beta2 * m + (1.0 - ref.beta2) * displacement
        out.trajectory.append(x.copy())
    out.x_final = x
    return out


def replay(ref: ReferenceLoop, stream: GradientStream, steps: int) -> ReplayResult:
    """Run `ref` for `steps` directions of `stream`."""
    if steps > len(stream):
        raise StreamExhaustedError(requested=steps, available=len(stream))
    if ref.kind == "signsgd_mom":
        return _signsgd_mom(ref, stream, steps)
    if ref.kind == "lion":
        return _lion(ref, stream, steps)
    if ref.kind == "lookahead":
        return _lookahead(ref, stream, steps, signed=False)
    if ref.kind == "signed_lookahead":
        return _lookahead(ref, stream, steps, signed=True)
    raise PreconditionError(f"Unknown reference loop: {ref.kind}", field="kind", value=ref.kind)
