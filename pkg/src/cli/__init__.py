from .schemas import SweepSpec, OutputSpec, ExperimentSpec, CellResult, ExperimentResult
from .config import parse_config, serialize_config, write_config, apply_overrides
from .emit import emit_trace, read_trace, emit_frame
from .runner import cell_config, simulate, rate_metric, run_cell, summarize, run_experiment, exit_status
from .checks import (
    LemmaReport,
    TheoremReport,
    check_lemma1,
    check_reductions,
    check_theorems,
    closed_form_mse,
)

__all__ = [
    "SweepSpec",
    "OutputSpec",
    "ExperimentSpec",
    "CellResult",
    "ExperimentResult",
    "parse_config",
    "serialize_config",
    "write_config",
    "apply_overrides",
    "emit_trace",
    "read_trace",
    "emit_frame",
    "cell_config",
    "simulate",
    "rate_metric",
    "run_cell",
    "summarize",
    "run_experiment",
    "exit_status",
    "LemmaReport",
    "TheoremReport",
    "check_lemma1",
    "check_reductions",
    "check_theorems",
    "closed_form_mse",
]
