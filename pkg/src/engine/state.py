from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from src.core.rng import RngStream
from src.core.vectors import ParamVector, zeros
from src.optim.base_opt import BaseOptState


@dataclass
class WorkerState:
    """One simulated worker: x^{(i)}_{t,k}, its base optimizer and this round's stream."""

    worker_id: int
    x_local: ParamVector
    base_state: BaseOptState
    rng: Optional[RngStream] = None
    # sum of the directions applied since the last synchronization
    dir_sum: Optional[ParamVector] = None

    def synchronize(self, x: ParamVector, rng: RngStream) -> None:
        self.x_local = x.copy()
        self.dir_sum = zeros(x.shape[0])
        self.rng = rng


@dataclass
class GlobalState:
    """
    Synchronized state x_{t,0} and the global buffers.

    `m` is the sign-momentum buffer (zero at start). `u` is the slow momentum
    of slowmo and signed_slowmo, `opt_state` the global AdamW moments,
    `x_prev` and `worker_momenta` belong to fedmv. `last_sign` is the sign
    vector of the most recent sign-momentum step.
    """

    x: ParamVector
    m: ParamVector
    round: int = 0
    u: Optional[ParamVector] = None
    opt_state: Optional[BaseOptState] = None
    x_prev: Optional[ParamVector] = None
    worker_momenta: List[ParamVector] = field(default_factory=list)
    last_sign: Optional[ParamVector] = None

    @classmethod
    def initial(cls, x0: ParamVector) -> "GlobalState":
        return cls(x=np.array(x0, dtype=np.float64), m=zeros(x0.shape[0]))
