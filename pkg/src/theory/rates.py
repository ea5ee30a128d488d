import logging
import math
from typing import Sequence

import numpy as np

from src.utils.exceptions import PreconditionError

logger = logging.getLogger(__name__)


def fit_rate(T_grid: Sequence[int], metric: Sequence[float]) -> float:
    """Least-squares slope of log(metric) against log(T)."""
    if len(T_grid) != len(metric):
        raise PreconditionError("T_grid and metric differ in length", field="metric", value=len(metric))
    if len(T_grid) < 3:
        raise PreconditionError("Rate fit needs at least 3 points", field="T_grid", value=len(T_grid))
    if any(t <= 0 for t in T_grid):
        raise PreconditionError("Horizons must be positive", field="T_grid")
    if any(not (m > 0 and math.isfinite(m)) for m in metric):
        raise PreconditionError("Rate fit needs positive finite metrics", field="metric")
    log_t = np.log(np.asarray(T_grid, dtype=np.float64))
    log_m = np.log(np.asarray(metric, dtype=np.float64))
    slope, _ = np.polyfit(log_t, log_m, 1)
    logger.debug(f"fit_rate over T={list(T_grid)}: slope={slope:.4f}")
    return float(slope)


def running_min(series: Sequence[float]) -> np.ndarray:
    return np.minimum.accumulate(np.asarray(series, dtype=np.float64))


def time_average_of_running_min(series: Sequence[float]) -> float:
    """(1/T) sum_t min_{s<=t} series[s]; damps the oscillation band of sign methods."""
    if len(series) == 0:
        raise PreconditionError("Empty series", field="series", value=0)
    return float(np.mean(running_min(series)))


def time_average(series: Sequence[float]) -> float:
    if len(series) == 0:
        raise PreconditionError("Empty series", field="series", value=0)
    return float(np.mean(np.asarray(series, dtype=np.float64)))
