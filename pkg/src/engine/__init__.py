from .config import VARIANTS, HyperConfig, SignConfig, SlowMoConfig, FedMVConfig, check_variant
from .state import WorkerState, GlobalState
from .trace import TRACE_COLUMNS, RoundRecord, DebugRound, RunTrace
from .local import LocalOutcome, run_worker, local_phase, parallel_round, all_reduce_mean
from .global_steps import (
    global_sign_step,
    slowmo_step,
    signed_slowmo_step,
    local_avg_step,
    global_adamw_step,
    majority_vote_step,
    centralized_momentum_step,
)
from .simulator import Simulator, run

__all__ = [
    "VARIANTS",
    "HyperConfig",
    "SignConfig",
    "SlowMoConfig",
    "FedMVConfig",
    "check_variant",
    "WorkerState",
    "GlobalState",
    "TRACE_COLUMNS",
    "RoundRecord",
    "DebugRound",
    "RunTrace",
    "LocalOutcome",
    "run_worker",
    "local_phase",
    "parallel_round",
    "all_reduce_mean",
    "global_sign_step",
    "slowmo_step",
    "signed_slowmo_step",
    "local_avg_step",
    "global_adamw_step",
    "majority_vote_step",
    "centralized_momentum_step",
    "Simulator",
    "run",
]
