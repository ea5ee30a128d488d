"""
Verification commands: the randomized-sign lemma by Monte Carlo, the
reduction identities, and the convergence bounds on a sweep.
"""

import logging
import math
import time
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed  # type: ignore
from pydantic import BaseModel, Field

from src.cli.runner import simulate, rate_metric
from src.cli.schemas import ExperimentSpec
from src.core.rng import GLOBAL_WORKER, Phase, derive_stream
from src.core.vectors import ParamVector, norm_l1, norm_l2, norm_l2_sq
from src.engine.config import HyperConfig
from src.engine.trace import RunTrace
from src.optim.sign_ops import SignMode, randomized_sign_batch
from src.problems.base import Problem
from src.reductions.suite import DEFAULT_SEEDS, ReductionCertificate, certify
from src.theory.bounds import (
    local_drift_bound,
    theorem2_min_T,
    theorem2_rhs,
    theorem3_rhs,
)
from src.theory.constants import TheoremConstants, estimate_constants
from src.theory.invariants import momentum_bound_ratio
from src.theory.rates import fit_rate
from src.utils.exceptions import PreconditionError

logger = logging.getLogger(__name__)

LEMMA_DRAWS = 1_000_000
LEMMA_CHUNK = 100_000
LEMMA_DIM = 16
LEMMA_VECTORS = 10
STANDARD_ERRORS = 4.0
MSE_TOLERANCE = 0.01
MOMENTUM_SLACK = 1e-12

# expected log-log slope of the fitted metric under each prescription
SLOPE_RANGES: Dict[str, Tuple[float, float]] = {
    "theorem1": (-0.8, -0.3),
    "theorem3": (-0.45, -0.10),
}


# ---- randomized sign lemma ----

class LemmaCheck(BaseModel):
    vector: int
    variant: str
    norm: float
    max_standard_errors: float = Field(..., description="Largest |mean - v/B| in units of its standard error")
    mse: float = Field(..., description="Empirical E||S(v) - v/B||^2")
    mse_closed_form: float
    passed: bool


class LemmaReport(BaseModel):
    passed: bool
    draws: int
    dim: int
    bound_B: float
    seconds: float
    checks: List[LemmaCheck]


def closed_form_mse(v: ParamVector, variant: str, bound: float) -> float:
    scaled_sq = norm_l2_sq(v) / bound**2
    if variant == "randomized_bipolar":
        return float(np.count_nonzero(v)) - scaled_sq
    return norm_l1(v) / bound - scaled_sq


def component_variance(v: ParamVector, variant: str, bound: float) -> np.ndarray:
    p = np.abs(v) / bound
    if variant == "randomized_bipolar":
        return np.where(v != 0, 1.0 - p**2, 0.0)
    return p - p**2


def lemma_vector(index: int, dim: int, bound: float, seed: int) -> ParamVector:
    """Random direction with norm in [B/2, B]; vector k has its first k % 4 components zeroed."""
    rng = derive_stream(seed, GLOBAL_WORKER, index, Phase.LEMMA)
    z = rng.standard_normal(dim)
    z[: index % 4] = 0.0
    return z / norm_l2(z) * bound * (0.5 + 0.5 * rng.random())


def monte_carlo_sign(v: ParamVector, mode: SignMode, draws: int, seed: int, stream: int) -> Tuple[np.ndarray, float]:
    """Mean of S(v) and mean of ||S(v) - v/B||^2 over `draws` applications."""
    target = v / mode.bound_B
    total = np.zeros_like(v)
    sq_total = 0.0
    rng = derive_stream(seed, stream, 0, Phase.LEMMA)
    done = 0
    while done < draws:
        chunk = min(LEMMA_CHUNK, draws - done)
        signs = randomized_sign_batch(v, mode, rng, chunk)
        total += signs.sum(axis=0)
        sq_total += float(np.square(signs - target).sum())
        done += chunk
    return total / draws, sq_total / draws


def check_lemma1(
    draws: int = LEMMA_DRAWS,
    dim: int = LEMMA_DIM,
    vectors: int = LEMMA_VECTORS,
    bound: float = 1.0,
    seed: int = 0,
) -> LemmaReport:
    """Unbiasedness and second moment of both randomized sign operators."""
    if draws < 2:
        raise PreconditionError("Monte Carlo needs at least 2 draws", field="draws", value=draws)
    start = time.perf_counter()
    checks: List[LemmaCheck] = []
    for j in range(vectors):
        v = lemma_vector(j, dim, bound, seed)
        for s, variant in enumerate(("randomized_bipolar", "randomized_sparse")):
            mode = SignMode(variant=variant, bound_B=bound)
            mean, mse = monte_carlo_sign(v, mode, draws, seed, 2 * j + s)
            se = np.sqrt(component_variance(v, variant, bound) / draws)
            deviation = np.abs(mean - v / bound)
            z = np.where(se > 0, deviation / np.where(se > 0, se, 1.0), np.where(deviation > 0, np.inf, 0.0))
            closed = closed_form_mse(v, variant, bound)
            passed = (
                float(z.max()) <= STANDARD_ERRORS
                and abs(mse - closed) <= MSE_TOLERANCE * closed
                and mse <= dim * (1.0 + MSE_TOLERANCE)
            )
            checks.append(
                LemmaCheck(
                    vector=j,
                    variant=variant,
                    norm=norm_l2(v),
                    max_standard_errors=float(z.max()),
                    mse=mse,
                    mse_closed_form=closed,
                    passed=passed,
                )
            )
            if not passed:
                logger.warning(f"Lemma check failed for vector {j} ({variant}): z={z.max():.2f} mse={mse:.5g} vs {closed:.5g}")
    seconds = time.perf_counter() - start
    report = LemmaReport(
        passed=all(c.passed for c in checks), draws=draws, dim=dim, bound_B=bound, seconds=seconds, checks=checks
    )
    logger.info(f"Randomized sign lemma: {sum(c.passed for c in checks)}/{len(checks)} checks passed in {seconds:.1f}s")
    return report


# ---- reductions ----

def check_reductions(seeds: Sequence[int] = DEFAULT_SEEDS) -> ReductionCertificate:
    return certify(seeds=seeds)


# ---- convergence bounds ----

class HorizonCheck(BaseModel):
    rounds: int
    seeds: int
    measured: float = Field(..., description="Seed-averaged rate metric")
    bound: Optional[float] = Field(None, description="Right-hand side of the matching bound")
    bound_name: Optional[str] = None
    min_rounds: Optional[int] = Field(None, description="Horizon from which the bound is claimed")
    within_bound: Optional[bool] = None
    below_horizon: bool = Field(False, description="T is below min_rounds; within_bound is reported but not checked")
    drift: Optional[float] = Field(None, description="Seed-averaged local drift")
    drift_bound: Optional[float] = None


class SpeedupEntry(BaseModel):
    n: int
    tau: int
    final_grad_l1: float = Field(..., description="Seed mean of ||grad f(x_{T,0})||_1")


class TheoremReport(BaseModel):
    name: str
    prescription: str
    metric: str
    constants: Dict[str, float]
    horizons: List[HorizonCheck]
    slope: Optional[float] = None
    slope_range: Optional[Tuple[float, float]] = None
    slope_ok: Optional[bool] = None
    momentum_ratio: float = Field(..., description="max_t ||m_t|| / (tau R-hat) over every run")
    momentum_ok: bool
    speedup: List[SpeedupEntry] = Field(default_factory=list)
    speedup_ok: Optional[bool] = None
    passed: bool


def _bound(spec: ExperimentSpec, c: TheoremConstants, trace: RunTrace) -> Tuple[Optional[float], Optional[str], Optional[int]]:
    prescription = spec.sweep.prescription
    if prescription == "theorem1":
        return theorem2_rhs(c), "theorem2", theorem2_min_T(c)
    if prescription == "theorem3":
        grad0 = math.sqrt(trace.records[0].grad_l2sq)
        return theorem3_rhs(c, grad0), "theorem3", None
    return None, None, None


def _drift(spec: ExperimentSpec, c: TheoremConstants, traces: List[RunTrace]) -> Tuple[Optional[float], Optional[float]]:
    if spec.algorithm.base_opt.kind != "sgd" or not traces[0].drift:
        return None, None
    measured = float(np.mean([t.drift_average() for t in traces]))
    try:
        return measured, local_drift_bound(c.gamma, c.L, c.sigma, c.delta, c.tau)
    except PreconditionError as e:
        logger.warning(f"Drift bound not applicable: {e.message}")
        return measured, None


def _simulate_all(
    spec: ExperimentSpec, variant: str, cells: List[Tuple[int, int]], **updates: Any
) -> List[Tuple[RunTrace, Problem, HyperConfig]]:
    if spec.output.jobs > 1 and len(cells) > 1:
        return Parallel(n_jobs=spec.output.jobs, backend="loky")(
            delayed(simulate)(spec, variant, T, seed, **updates) for T, seed in cells
        )
    return [simulate(spec, variant, T, seed, **updates) for T, seed in cells]


def _speedup(spec: ExperimentSpec, rounds: int) -> Tuple[List[SpeedupEntry], Optional[bool]]:
    if not spec.sweep.speedup:
        return [], None
    variant = spec.variants[0]
    entries = []
    for n, tau in spec.sweep.speedup:
        traces = _simulate_all(spec, variant, [(rounds, s) for s in spec.seeds], n=n, tau=tau)
        finals = [trace.records[-1].grad_l1 for trace, _, _ in traces]
        entries.append(SpeedupEntry(n=n, tau=tau, final_grad_l1=float(np.mean(finals))))
        logger.info(f"speedup n={n} tau={tau}: final grad_l1 {entries[-1].final_grad_l1:.6g}")
    ordered = sorted(entries, key=lambda e: e.n * e.tau)
    ok = all(a.final_grad_l1 > b.final_grad_l1 for a, b in zip(ordered, ordered[1:]))
    return entries, ok


def check_theorems(spec: ExperimentSpec, sample_budget: int = 10_000) -> TheoremReport:
    """
    Run the sweep's first variant over every horizon and seed and compare
    against the bound matching the sweep's prescription.

    Constants are estimated once, on the first seed at the largest horizon;
    R is the larger of the declared direction bound and the largest recorded
    direction norm of any run. Horizons below the bound's min_rounds are
    reported with below_horizon set and left out of `passed`. Runs go to
    joblib workers when output.jobs > 1.
    """
    variant = spec.variants[0]
    grid = sorted(spec.rounds_grid)
    metric = spec.sweep.rate_metric
    runs: Dict[int, List[Tuple[RunTrace, HyperConfig]]] = {}
    problem: Optional[Problem] = None
    all_traces: List[RunTrace] = []
    cells = [(T, seed) for T in grid for seed in spec.seeds]
    results = _simulate_all(spec, variant, cells)
    for (T, _), (trace, problem, cfg) in zip(cells, results):
        runs.setdefault(T, []).append((trace, cfg))
        all_traces.append(trace)
    logger.info(f"check-theorems: {len(cells)} runs done, jobs={spec.output.jobs}")

    last_trace = runs[grid[-1]][0][0]
    base = estimate_constants(last_trace, problem, sample_budget=sample_budget)
    R = max([t.max_dir_norm for t in all_traces] + [spec.algorithm.sign.direction_bound or 0.0])

    horizons: List[HorizonCheck] = []
    means: List[float] = []
    for T in grid:
        traces = [t for t, _ in runs[T]]
        cfg = runs[T][0][1]
        c = base.model_copy(
            update={"R": R, "T": T, "eta": cfg.global_lr, "gamma": cfg.local_lr.peak, "beta": cfg.beta1}
        )
        measured = float(np.mean([rate_metric(t, metric) for t in traces]))
        means.append(measured)
        bound, bound_name, min_T = _bound(spec, c, traces[0])
        drift, drift_bound = _drift(spec, c, traces)
        horizons.append(
            HorizonCheck(
                rounds=T,
                seeds=len(traces),
                measured=measured,
                bound=bound,
                bound_name=bound_name,
                min_rounds=min_T,
                within_bound=None if bound is None else measured <= bound,
                below_horizon=min_T is not None and T < min_T,
                drift=drift,
                drift_bound=drift_bound,
            )
        )

    slope, slope_range, slope_ok = None, SLOPE_RANGES.get(spec.sweep.prescription), None
    if len(grid) >= 3:
        slope = fit_rate(grid, means)
        if slope_range is not None:
            slope_ok = slope_range[0] <= slope <= slope_range[1]

    ratio = max(momentum_bound_ratio(t) for t in all_traces)
    momentum_ok = ratio <= 1.0 + MOMENTUM_SLACK
    speedup, speedup_ok = _speedup(spec, spec.sweep.speedup_rounds or grid[-1])

    checks = [h.within_bound for h in horizons if not h.below_horizon] + [slope_ok, momentum_ok, speedup_ok]
    checks += [h.drift <= h.drift_bound for h in horizons if h.drift is not None and h.drift_bound is not None]
    report = TheoremReport(
        name=spec.name,
        prescription=spec.sweep.prescription,
        metric=metric,
        constants={k: float(v) for k, v in base.model_copy(update={"R": R}).model_dump().items()},
        horizons=horizons,
        slope=slope,
        slope_range=slope_range,
        slope_ok=slope_ok,
        momentum_ratio=ratio,
        momentum_ok=momentum_ok,
        speedup=speedup,
        speedup_ok=speedup_ok,
        passed=all(c is not False for c in checks),
    )
    logger.info(f"check-theorems '{spec.name}': slope={slope} passed={report.passed}")
    return report
