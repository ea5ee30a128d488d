"""
Certification of the engine's reduction identities.

Each identity runs the engine on a small noisy quadratic and compares every
x_{t,0} bitwise (through its content hash) with either a reference loop
replaying worker 0's recorded directions, or a second engine variant run
on the same seed.
"""

import logging
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from src.core.schedules import Schedule
from src.core.vectors import content_hash
from src.engine.config import HyperConfig, SignConfig, SlowMoConfig
from src.engine.simulator import run
from src.engine.trace import RunTrace
from src.optim.base_opt import BaseOptConfig
from src.problems.factory import ProblemSpec, make_problem
from src.reductions.reference import GradientStream, ReferenceLoop, replay
from src.utils.exceptions import PreconditionError

logger = logging.getLogger(__name__)

DEFAULT_SEEDS = (0, 1, 2, 3, 4)
ROUNDS = 40
DIM = 8


class IdentityCheck(BaseModel):
    identity: str = Field(..., description="Name of the reduction identity")
    setting: Dict[str, float] = Field(..., description="Hyperparameters of this cell")
    seed: int
    passed: bool
    first_mismatch: Optional[int] = Field(None, description="First round whose x_{t,0} differs")


class ReductionCertificate(BaseModel):
    passed: bool
    checks: List[IdentityCheck]

    @property
    def failures(self) -> List[IdentityCheck]:
        return [c for c in self.checks if not c.passed]


def recorded_stream(trace: RunTrace) -> GradientStream:
    """Worker 0's directions in consumption order, from an instrumented trace."""
    directions = np.concatenate([r.worker0_directions for r in trace.debug])
    gammas = np.concatenate([np.full(r.worker0_directions.shape[0], r.gamma) for r in trace.debug])
    return GradientStream(directions=directions, gammas=gammas)


def first_mismatch(hashes_a: Sequence[str], hashes_b: Sequence[str]) -> Optional[int]:
    if len(hashes_a) != len(hashes_b):
        return min(len(hashes_a), len(hashes_b))
    for t, (a, b) in enumerate(zip(hashes_a, hashes_b)):
        if a != b:
            return t
    return None


def _trace_hashes(trace: RunTrace) -> List[str]:
    return [r.x_hash for r in trace.records]


def _config(seed: int, **overrides) -> HyperConfig:
    base = dict(
        variant="dsm",
        n=1,
        tau=1,
        rounds=ROUNDS,
        local_lr=Schedule(peak=0.05),
        global_lr=1.0,
        weight_decay=0.0,
        base_opt=BaseOptConfig(kind="sgd"),
        sign=SignConfig(),
        seed=seed,
        instrument=True,
    )
    base.update(overrides)
    return HyperConfig(**base)


def _problem(cfg: HyperConfig, seed: int):
    spec = ProblemSpec(kind="quadratic", dim=DIM, noise_sigma=0.5, heterogeneity=0.5, structural_seed=100 + seed)
    return make_problem(spec, cfg.n)


def _against_reference(cfg: HyperConfig, ref_kind: str, **ref_params) -> Optional[int]:
    problem = _problem(cfg, cfg.seed)
    trace = run(cfg, problem)
    ref = ReferenceLoop(kind=ref_kind, x0=problem.x0, tau=cfg.tau, **ref_params)
    result = replay(ref, recorded_stream(trace), cfg.rounds * cfg.tau)
    return first_mismatch(_trace_hashes(trace), [content_hash(x) for x in result.trajectory])


def _against_variant(cfg: HyperConfig, other: HyperConfig) -> Optional[int]:
    a = run(cfg, _problem(cfg, cfg.seed))
    b = run(other, _problem(other, other.seed))
    return first_mismatch(_trace_hashes(a), _trace_hashes(b))


def dsm_is_signsgd_momentum(seed: int, beta: float) -> Optional[int]:
    cfg = _config(seed, beta1=beta, beta2=beta, global_lr=0.5)
    return _against_reference(cfg, "signsgd_mom", lr=cfg.global_lr, beta1=beta)


def dsm_is_centralized(seed: int, beta: float) -> Optional[int]:
    cfg = _config(seed, beta1=beta, beta2=beta, global_lr=0.5)
    return _against_variant(cfg, cfg.model_copy(update={"variant": "centralized_signsgd_momentum"}))


def dsm_is_signed_lookahead(seed: int, tau: int) -> Optional[int]:
    cfg = _config(seed, tau=tau, beta1=0.9, beta2=0.9)
    return _against_reference(cfg, "signed_lookahead", lr=cfg.global_lr, beta1=0.9, beta2=0.9)


def dsm_is_lion(seed: int, weight_decay: float) -> Optional[int]:
    cfg = _config(seed, beta1=0.9, beta2=0.99, weight_decay=weight_decay)
    return _against_reference(
        cfg, "lion", lr=cfg.global_lr, beta1=0.9, beta2=0.99, weight_decay=weight_decay
    )


def lookahead_is_base(seed: int, peak: float) -> Optional[int]:
    cfg = _config(seed, variant="local_avg", local_lr=Schedule(peak=peak))
    return _against_reference(cfg, "lookahead", lr=1.0, beta1=0.0, beta2=0.0)


def slowmo_is_local_avg(seed: int, n: int) -> Optional[int]:
    cfg = _config(seed, variant="slowmo", n=n, slowmo=SlowMoConfig(beta=0.0, alpha=1.0), instrument=False)
    return _against_variant(cfg, cfg.model_copy(update={"variant": "local_avg"}))


IDENTITIES: Dict[str, tuple[Callable[[int, float], Optional[int]], str, Sequence[float]]] = {
    "dsm_equals_signsgd_momentum": (dsm_is_signsgd_momentum, "beta", (0.0, 0.5, 0.9)),
    "dsm_equals_centralized_variant": (dsm_is_centralized, "beta", (0.0, 0.5, 0.9)),
    "dsm_single_worker_equals_signed_lookahead": (dsm_is_signed_lookahead, "tau", (2, 4, 8)),
    "dsm_single_step_equals_lion": (dsm_is_lion, "weight_decay", (0.0, 0.1, 0.5)),
    "lookahead_unit_step_equals_base": (lookahead_is_base, "peak", (0.01, 0.05, 0.2)),
    "slowmo_without_momentum_equals_local_avg": (slowmo_is_local_avg, "n", (1, 2, 4)),
}


def certify(seeds: Sequence[int] = DEFAULT_SEEDS, identities: Optional[Sequence[str]] = None) -> ReductionCertificate:
    """Run every identity over every seed and setting."""
    names = list(IDENTITIES) if identities is None else list(identities)
    unknown = [name for name in names if name not in IDENTITIES]
    if unknown:
        raise PreconditionError(
            f"Unknown reduction identities: {unknown}", field="identities", constraint=f"one of {list(IDENTITIES)}"
        )
    checks: List[IdentityCheck] = []
    for name in names:
        fn, param, values = IDENTITIES[name]
        for value in values:
            arg = int(value) if param in ("tau", "n") else float(value)
            for seed in seeds:
                mismatch = fn(seed, arg)
                checks.append(
                    IdentityCheck(
                        identity=name,
                        setting={param: float(value)},
                        seed=seed,
                        passed=mismatch is None,
                        first_mismatch=mismatch,
                    )
                )
                if mismatch is not None:
                    logger.warning(f"{name} {param}={value} seed={seed}: first mismatch at round {mismatch}")
    certificate = ReductionCertificate(passed=all(c.passed for c in checks), checks=checks)
    logger.info(f"Reduction suite: {len(checks) - len(certificate.failures)}/{len(checks)} checks passed")
    return certificate
