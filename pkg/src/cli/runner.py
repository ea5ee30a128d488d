"""
Experiment orchestration.

A sweep is the product variants x horizons x seeds. Each cell builds its
problem from the structural seed, simulates one run, writes its own trace
files and returns a CellResult; the summary is written once every cell has
finished.
"""

import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd
from joblib import Parallel, delayed  # type: ignore
from pydantic import ValidationError

from src.cli.emit import emit_frame, emit_trace
from src.cli.schemas import CellResult, ExperimentResult, ExperimentSpec
from src.core.rng import GLOBAL_WORKER, Phase, derive_stream
from src.core.schedules import Schedule
from src.engine.config import HyperConfig
from src.engine.simulator import run
from src.engine.trace import RunTrace
from src.problems.base import Problem
from src.problems.factory import make_problem
from src.problems.optimum import f_star
from src.theory.bounds import theorem1_prescription, theorem3_prescription
from src.theory.constants import estimate_smoothness
from src.theory.rates import fit_rate, time_average, time_average_of_running_min
from src.utils.error_handlers import config_error_from_validation
from src.utils.exceptions import BaseSimulationException, ConfigError, PreconditionError

logger = logging.getLogger(__name__)

SUMMARY_FILE = "summary.csv"


def _rescaled_schedule(schedule: Schedule, base_rounds: int, rounds: int) -> Schedule:
    """Stretch a cosine schedule written for base_rounds onto a different horizon."""
    if schedule.kind != "cosine" or rounds == base_rounds:
        return schedule
    total = max(1, rounds - 1, round(schedule.total_steps * rounds / base_rounds))
    warmup = min(total, round(schedule.warmup_steps * rounds / base_rounds))
    return schedule.model_copy(update={"total_steps": total, "warmup_steps": warmup})


def smoothness_for(problem: Problem) -> float:
    L = problem.smoothness_upper_bound()
    if math.isfinite(L):
        return L
    rng = derive_stream(0, GLOBAL_WORKER, 0, Phase.ESTIMATE)
    return estimate_smoothness(problem, [problem.x0], rng)


def cell_config(
    spec: ExperimentSpec,
    variant: str,
    rounds: int,
    seed: int,
    problem: Problem,
    **updates: Any,
) -> HyperConfig:
    """The algorithm block specialised to one cell, with the sweep's prescription applied."""
    base = spec.algorithm
    data: Dict[str, Any] = base.model_dump(mode="json", exclude_none=True)
    data.update(
        variant=variant,
        rounds=rounds,
        seed=seed,
        local_lr=_rescaled_schedule(base.local_lr, base.rounds, rounds).model_dump(mode="json"),
    )
    data.update(spec.sweep.overrides.get(variant, {}))
    data.update(updates)
    n, tau = data["n"], data["tau"]

    prescription = spec.sweep.prescription
    if prescription == "theorem1":
        gamma = theorem1_prescription(base.sign.direction_bound, data["global_lr"], n, tau, rounds)
        data["local_lr"] = {"kind": "constant", "peak": gamma}
    elif prescription == "theorem3":
        eta, beta = theorem3_prescription(smoothness_for(problem), rounds)
        data.update(global_lr=eta, beta1=beta, beta2=beta)
    try:
        return HyperConfig.model_validate(data)
    except ValidationError as e:
        raise config_error_from_validation(e, prefix="algorithm")


def simulate(
    spec: ExperimentSpec,
    variant: str,
    rounds: int,
    seed: int,
    **updates: Any,
) -> Tuple[RunTrace, Problem, HyperConfig]:
    n = updates.get("n", spec.sweep.overrides.get(variant, {}).get("n", spec.algorithm.n))
    problem = make_problem(spec.problem, n)
    if spec.sweep.rate_metric == "inner_grad_sq":
        updates.setdefault("inner_metrics", True)
    cfg = cell_config(spec, variant, rounds, seed, problem, **updates)
    return run(cfg, problem), problem, cfg


def rate_metric(trace: RunTrace, metric: str) -> float:
    """The quantity a sweep fits a rate to, over x_{t,0} for t < T."""
    T = trace.rounds
    if metric == "inner_grad_sq":
        return trace.inner_grad_sq_average()
    if metric == "grad_l1_running_min":
        return time_average_of_running_min(trace.column("grad_l1")[:T])
    return time_average(trace.column("grad_l2sq")[:T])


def gap_reduction(trace: RunTrace, problem: Problem) -> Optional[float]:
    """Fraction of f(x_0) - f_* removed by the run; None when the initial gap vanishes."""
    target = f_star(problem, budget=trace.rounds)
    initial = trace.records[0].loss - target
    if initial <= 0:
        return None
    return (trace.records[0].loss - trace.records[-1].loss) / initial


def cell_name(variant: str, rounds: int, seed: int) -> str:
    return f"{variant}_T{rounds}_seed{seed}"


def run_cell(spec: ExperimentSpec, variant: str, rounds: int, seed: int) -> CellResult:
    algo = spec.algorithm
    name = cell_name(variant, rounds, seed)
    try:
        trace, problem, cfg = simulate(spec, variant, rounds, seed)
    except BaseSimulationException as e:
        if isinstance(e, ConfigError):
            raise
        logger.error(f"Cell {name} aborted: {e.message}", extra={"cell": name, "error_code": e.error_code})
        return CellResult(
            variant=variant, rounds=rounds, seed=seed, n=algo.n, tau=algo.tau,
            status="aborted", error=f"{e.error_code}: {e.message}", exit_code=e.exit_code,
        )

    directory = Path(spec.output.directory)
    files = [str(emit_trace(trace, fmt, directory / f"{name}.{fmt}")) for fmt in spec.output.formats]
    last = trace.records[-1]
    return CellResult(
        variant=variant,
        rounds=rounds,
        seed=seed,
        n=cfg.n,
        tau=cfg.tau,
        status="ok",
        final_loss=last.loss,
        final_grad_l1=last.grad_l1,
        final_grad_l2sq=last.grad_l2sq,
        metric=rate_metric(trace, spec.sweep.rate_metric),
        max_dir_norm=trace.max_dir_norm,
        max_momentum_norm=trace.max_momentum_norm,
        gap_reduction=gap_reduction(trace, problem) if spec.sweep.report_gap else None,
        files=files,
    )


def summarize(cells: List[CellResult]) -> Tuple[pd.DataFrame, Dict[str, Optional[float]]]:
    """Seed-averaged table per (variant, T) and one fitted slope per variant."""
    frame = pd.DataFrame([c.model_dump(exclude={"files", "error"}) for c in cells if c.status == "ok"])
    if frame.empty:
        return frame, {}
    columns = ["final_loss", "final_grad_l1", "final_grad_l2sq", "metric", "gap_reduction"]
    frame[columns] = frame[columns].astype(float)
    table = (
        frame.groupby(["variant", "rounds"], sort=True)[columns]
        .mean()
        .join(frame.groupby(["variant", "rounds"], sort=True).size().rename("seeds"))
        .reset_index()
    )
    slopes: Dict[str, Optional[float]] = {}
    for variant, group in table.groupby("variant", sort=True):
        slopes[variant] = None
        if len(group) >= 3:
            try:
                slopes[variant] = fit_rate(group["rounds"].tolist(), group["metric"].tolist())
            except PreconditionError as e:
                logger.warning(f"No rate fitted for {variant}: {e.message}")
    table["slope"] = table["variant"].map(slopes)
    return table, slopes


def run_experiment(spec: ExperimentSpec, run_id: str, single: bool = False) -> ExperimentResult:
    """
    Execute every cell of `spec` (only the algorithm block's own cell when `single`).

    Cells run concurrently in worker processes when output.jobs > 1; each
    writes only its own files, and the summary follows the barrier.
    """
    if single:
        cells_todo = [(spec.algorithm.variant, spec.algorithm.rounds, spec.algorithm.seed)]
    else:
        cells_todo = [(v, T, s) for v in spec.variants for T in spec.rounds_grid for s in spec.seeds]
    logger.info(
        f"Experiment '{spec.name}': {len(cells_todo)} cells, jobs={spec.output.jobs}",
        extra={"run_id": run_id},
    )

    if spec.output.jobs > 1 and len(cells_todo) > 1:
        cells = Parallel(n_jobs=spec.output.jobs, backend="loky")(
            delayed(run_cell)(spec, v, T, s) for v, T, s in cells_todo
        )
    else:
        cells = [run_cell(spec, v, T, s) for v, T, s in cells_todo]

    table, slopes = summarize(cells)
    summary_path = None
    if not table.empty:
        summary_path = str(emit_frame(table, Path(spec.output.directory) / SUMMARY_FILE))

    aborted = [c for c in cells if c.status == "aborted"]
    if aborted:
        logger.error(
            f"{len(aborted)} of {len(cells)} cells aborted: "
            + ", ".join(cell_name(c.variant, c.rounds, c.seed) for c in aborted),
            extra={"run_id": run_id},
        )
    else:
        logger.info(f"Experiment '{spec.name}' finished, summary at {summary_path}", extra={"run_id": run_id})
    return ExperimentResult(name=spec.name, cells=cells, slopes=slopes, summary_path=summary_path)


def exit_status(result: ExperimentResult) -> int:
    return max((c.exit_code for c in result.cells if c.status == "aborted"), default=0)
