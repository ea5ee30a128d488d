"""
The distributed simulation loop.

One round: synchronize every worker to x_{t,0}, run tau local steps per
worker, all-reduce the accumulated directions into the pseudo-gradient
g_t, then apply the variant's global update. Rounds with gamma_t = 0 run
the local phase and leave the global state untouched.
"""

import logging
from contextlib import nullcontext
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed  # type: ignore

from src.core.rng import GLOBAL_WORKER, Phase, derive_stream
from src.core.schedules import learning_rate
from src.core.vectors import ParamVector, content_hash, ensure_finite, mean_vectors, norm_l1, norm_l2, norm_l2_sq, zeros
from src.engine.config import HyperConfig, check_variant
from src.engine.global_steps import (
    centralized_momentum_step,
    global_adamw_step,
    global_sign_step,
    local_avg_step,
    majority_vote_step,
    signed_slowmo_step,
    slowmo_step,
)
from src.engine.local import LocalOutcome, all_reduce_mean, local_phase, parallel_round
from src.engine.state import GlobalState, WorkerState
from src.engine.trace import DebugRound, RoundRecord, RunTrace
from src.optim.base_opt import BaseOptState
from src.problems.base import Problem
from src.utils.exceptions import NumericalAbortError, PreconditionError

logger = logging.getLogger(__name__)


class Simulator:
    """Runs one HyperConfig on one problem and returns its RunTrace."""

    def __init__(self, cfg: HyperConfig, problem: Problem):
        check_variant(cfg.variant)
        if cfg.n != problem.n_workers:
            raise PreconditionError(
                f"Config has n={cfg.n} workers but the problem has {problem.n_workers}",
                field="n",
                value=cfg.n,
                constraint=f"== {problem.n_workers}",
            )
        self.cfg = cfg
        self.problem = problem
        self.state = GlobalState.initial(problem.x0)
        self.workers = [
            WorkerState(i, self.state.x.copy(), BaseOptState.fresh(cfg.base_opt, problem.dim))
            for i in range(cfg.n)
        ]
        self.trace = RunTrace(config=cfg.model_dump(mode="json"))
        self._keep_snapshots = problem.dim <= cfg.snapshot_dim_limit
        self._rounds: Dict[str, Callable[[int, float, Optional[Parallel]], float]] = {
            "dsm": self._round_dsm,
            "slowmo": self._round_slowmo,
            "signed_slowmo": self._round_signed_slowmo,
            "local_avg": self._round_local_avg,
            "global_adamw": self._round_global_adamw,
            "fedmv": self._round_fedmv,
            "centralized_signsgd_momentum": self._round_centralized,
        }

    def run(self) -> RunTrace:
        cfg = self.cfg
        round_fn = self._rounds[cfg.variant]
        logger.info(
            f"Starting {cfg.variant}: n={cfg.n} tau={cfg.tau} T={cfg.rounds} d={self.problem.dim}",
            extra={"variant": cfg.variant, "seed": cfg.seed},
        )
        self._record(0, gamma=0.0, max_dir_norm=0.0)
        pool = Parallel(n_jobs=cfg.jobs, backend="threading") if cfg.jobs > 1 and cfg.n > 1 else nullcontext()
        with pool as parallel:
            for t in range(cfg.rounds):
                gamma = learning_rate(t, cfg.local_lr)
                max_norm = round_fn(t, gamma, parallel)
                ensure_finite(self.state.x, t)
                self._broadcast()
                self.state.round = t + 1
                self._record(t, gamma, max_norm)
        self.trace.x_final = self.state.x.copy()
        last = self.trace.records[-1]
        logger.info(
            f"Finished {cfg.variant}: loss={last.loss:.6g} grad_l1={last.grad_l1:.6g}",
            extra={"variant": cfg.variant, "seed": cfg.seed},
        )
        return self.trace

    def _broadcast(self) -> None:
        # workers leave every round holding x_{t+1,0}
        for w in self.workers:
            w.x_local = self.state.x.copy()

    def _record(self, round_index: int, gamma: float, max_dir_norm: float) -> None:
        x = self.state.x
        loss = self.problem.loss(x)
        if not np.isfinite(loss):
            raise NumericalAbortError(round_index, reason="loss became NaN/Inf")
        grad = self.problem.full_grad(x)
        record = RoundRecord(
            round=self.state.round,
            gamma_t=gamma,
            loss=loss,
            grad_l1=norm_l1(grad),
            grad_l2sq=norm_l2_sq(grad),
            max_dir_norm=max_dir_norm,
            x_hash=content_hash(x),
        )
        self.trace.records.append(record)
        momentum = self.state.u if self.cfg.variant in ("slowmo", "signed_slowmo") else self.state.m
        self.trace.momentum_norms.append(0.0 if momentum is None else norm_l2(momentum))
        if self._keep_snapshots:
            self.trace.snapshots.append(x.copy())
        logger.debug(f"round {record.round}: loss={loss:.10g} grad_l2sq={record.grad_l2sq:.4g}")

    # ---- local phase ----

    def _local(self, t: int, gamma: float, parallel: Optional[Parallel]) -> Tuple[List[LocalOutcome], ParamVector]:
        cfg = self.cfg
        for w in self.workers:
            w.synchronize(self.state.x, derive_stream(cfg.seed, w.worker_id, t, Phase.LOCAL))
        record = cfg.inner_metrics or cfg.instrument
        if parallel is not None:
            outcomes = parallel_round(self.workers, self.problem, gamma, cfg.tau, t, record, parallel=parallel)
        else:
            outcomes = local_phase(self.workers, self.problem, gamma, cfg.tau, t, record)
        g = all_reduce_mean([o.dir_sum for o in outcomes])
        if cfg.inner_metrics:
            self._inner_metrics(outcomes)
        if cfg.instrument:
            avg = np.stack([mean_vectors([o.directions[k] for o in outcomes]) for k in range(cfg.tau)])
            self.trace.debug.append(
                DebugRound(
                    round=t,
                    gamma=gamma,
                    x=self.state.x.copy(),
                    m=self.state.m.copy(),
                    avg_directions=avg,
                    worker0_directions=outcomes[0].directions.copy(),
                )
            )
        return outcomes, g

    def _inner_metrics(self, outcomes: List[LocalOutcome]) -> None:
        grad_sq, drift = [], []
        for k in range(self.cfg.tau):
            locals_k = [o.iterates[k] for o in outcomes]
            x_k = mean_vectors(locals_k)
            grad_sq.append(norm_l2_sq(self.problem.full_grad(x_k)))
            drift.append(float(np.mean([norm_l2_sq(x_k - xi) for xi in locals_k])))
        self.trace.inner_grad_sq.append(float(np.mean(grad_sq)))
        self.trace.drift.append(float(np.mean(drift)))

    def _schedule_scale(self, gamma: float) -> float:
        # global steps without gamma follow the shape of the local schedule;
        # the default constant schedule gives 1, so the step is exactly eta
        return gamma / self.cfg.local_lr.peak

    @staticmethod
    def _max_norm(outcomes: List[LocalOutcome]) -> float:
        return max(o.max_dir_norm for o in outcomes)

    # ---- variants ----

    def _round_dsm(self, t: int, gamma: float, parallel: Optional[Parallel]) -> float:
        outcomes, g = self._local(t, gamma, parallel)
        if gamma > 0:
            rng = derive_stream(self.cfg.seed, GLOBAL_WORKER, t, Phase.SIGN) if self.cfg.sign_mode.randomized else None
            global_sign_step(self.state, None, gamma, self.cfg, rng=rng, pseudo_grad=g)
            if self.cfg.instrument:
                self.trace.debug[-1].sign = self.state.last_sign.copy()
        return self._max_norm(outcomes)

    def _round_slowmo(self, t: int, gamma: float, parallel: Optional[Parallel]) -> float:
        outcomes, g = self._local(t, gamma, parallel)
        if gamma > 0:
            slowmo_step(self.state, g, gamma, self.cfg)
        return self._max_norm(outcomes)

    def _round_signed_slowmo(self, t: int, gamma: float, parallel: Optional[Parallel]) -> float:
        outcomes, g = self._local(t, gamma, parallel)
        if gamma > 0:
            signed_slowmo_step(self.state, g, gamma, self.cfg)
        return self._max_norm(outcomes)

    def _round_local_avg(self, t: int, gamma: float, parallel: Optional[Parallel]) -> float:
        outcomes, g = self._local(t, gamma, parallel)
        if gamma > 0:
            local_avg_step(self.state, g, gamma)
        return self._max_norm(outcomes)

    def _round_global_adamw(self, t: int, gamma: float, parallel: Optional[Parallel]) -> float:
        outcomes, g = self._local(t, gamma, parallel)
        if gamma > 0:
            global_adamw_step(self.state, g, self.cfg, scale=self._schedule_scale(gamma))
        return self._max_norm(outcomes)

    def _fedmv_worker(self, i: int, y: ParamVector, gamma: float, t: int) -> Tuple[ParamVector, float]:
        cfg = self.cfg
        rng = derive_stream(cfg.seed, i, t, Phase.LOCAL)
        z = y
        max_norm = 0.0
        for _ in range(cfg.tau):
            g = self.problem.stochastic_grad(i, z, rng)
            max_norm = max(max_norm, norm_l2(g))
            z = z - gamma * g
        ensure_finite(z, t, what=f"worker {i} parameters")
        g_y = self.problem.stochastic_grad(i, z, derive_stream(cfg.seed, i, t, Phase.FEDMV_SAMPLE))
        beta = cfg.fedmv.beta
        return beta * self.state.worker_momenta[i] + (1.0 - beta) * g_y, max(max_norm, norm_l2(g_y))

    def _round_fedmv(self, t: int, gamma: float, parallel: Optional[Parallel]) -> float:
        cfg, state = self.cfg, self.state
        if not state.worker_momenta:
            state.worker_momenta = [zeros(self.problem.dim) for _ in range(cfg.n)]
        x_prev = state.x if state.x_prev is None else state.x_prev
        y = state.x + cfg.fedmv.alpha * (state.x - x_prev)
        if parallel is not None:
            results = list(parallel(delayed(self._fedmv_worker)(i, y, gamma, t) for i in range(cfg.n)))
        else:
            results = [self._fedmv_worker(i, y, gamma, t) for i in range(cfg.n)]
        state.worker_momenta = [m for m, _ in results]
        rngs = [derive_stream(cfg.seed, i, t, Phase.SIGN) for i in range(cfg.n)]
        if gamma > 0:
            majority_vote_step(state, state.worker_momenta, cfg, rngs, scale=self._schedule_scale(gamma))
        return max(norm for _, norm in results)

    def _round_centralized(self, t: int, gamma: float, parallel: Optional[Parallel]) -> float:
        cfg, state = self.cfg, self.state
        rngs = [derive_stream(cfg.seed, i, t, Phase.LOCAL) for i in range(cfg.n)]
        max_norm = 0.0
        grad_sq = []
        for k in range(cfg.tau):
            if cfg.inner_metrics:
                grad_sq.append(norm_l2_sq(self.problem.full_grad(state.x)))
            grads = [self.problem.stochastic_grad(i, state.x, rngs[i]) for i in range(cfg.n)]
            max_norm = max(max_norm, max(norm_l2(g) for g in grads))
            if gamma > 0:
                step = t * cfg.tau + k
                rng = derive_stream(cfg.seed, GLOBAL_WORKER, step, Phase.SIGN) if cfg.sign_mode.randomized else None
                centralized_momentum_step(state, all_reduce_mean(grads), gamma, cfg, rng)
        if cfg.inner_metrics:
            self.trace.inner_grad_sq.append(float(np.mean(grad_sq)))
            self.trace.drift.append(0.0)
        return max_norm


def run(cfg: HyperConfig, problem: Problem) -> RunTrace:
    """Simulate `cfg` on `problem`; the trace depends only on (cfg, problem)."""
    return Simulator(cfg, problem).run()
