import math

import numpy as np
import pandas as pd
import pytest

from src.cli.config import apply_overrides, parse_config
from src.cli.runner import (
    SUMMARY_FILE,
    _rescaled_schedule,
    cell_config,
    cell_name,
    exit_status,
    gap_reduction,
    rate_metric,
    run_experiment,
    simulate,
    summarize,
)
from src.core.schedules import Schedule
from src.problems.factory import make_problem
from src.utils.exceptions import UnknownKeyError


def trace_files(directory):
    return sorted(p.name for p in directory.iterdir() if p.name != SUMMARY_FILE)


def test_cells_write_one_trace_each_and_a_summary(small_spec, tmp_path):
    spec = small_spec()
    result = run_experiment(spec, "run_test")
    out = tmp_path / "out"
    assert len(result.cells) == 6
    assert trace_files(out) == sorted(f"{v}_T20_seed{s}.csv" for v in ("dsm", "slowmo") for s in range(3))
    assert result.summary_path == str(out / SUMMARY_FILE)
    summary = pd.read_csv(out / SUMMARY_FILE)
    assert summary["variant"].tolist() == ["dsm", "slowmo"]
    assert summary["seeds"].tolist() == [3, 3]
    assert exit_status(result) == 0


def test_single_run_uses_algorithm_block(small_spec, tmp_path):
    result = run_experiment(small_spec(), "run_test", single=True)
    assert [(c.variant, c.seed) for c in result.cells] == [("dsm", 0)]
    assert trace_files(tmp_path / "out") == ["dsm_T20_seed0.csv"]


def test_reruns_are_byte_identical(configs_dir, tmp_path):
    spec = parse_config(configs_dir / "determinism.toml")
    first = apply_overrides(spec, out=str(tmp_path / "first"), jobs=1)
    second = apply_overrides(spec, out=str(tmp_path / "second"), jobs=2)
    run_experiment(first, "run_a")
    run_experiment(second, "run_b")
    names = trace_files(tmp_path / "first")
    assert len(names) == 12
    assert names == trace_files(tmp_path / "second")
    for name in names + [SUMMARY_FILE]:
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes()


def test_grid_sweep_fits_one_slope_per_variant(small_spec):
    spec = small_spec(sweep={"rounds_grid": [16, 32, 64], "seeds": 2})
    result = run_experiment(spec, "run_test")
    assert set(result.slopes) == {"dsm", "slowmo"}
    assert all(s is not None and math.isfinite(s) for s in result.slopes.values())
    summary = pd.read_csv(result.summary_path)
    assert len(summary) == 6
    assert summary["slope"].notna().all()


def test_aborted_cells_set_exit_status(small_spec):
    spec = small_spec(
        algorithm={"variant": "local_avg", "rounds": 200, "local_lr": {"peak": 10.0}},
        sweep={"variants": ["local_avg"], "seeds": 1},
    )
    with np.errstate(over="ignore", invalid="ignore"):
        result = run_experiment(spec, "run_test")
    assert result.cells[0].status == "aborted"
    assert result.cells[0].error.startswith("NUMERICAL_ABORT")
    assert result.summary_path is None
    assert exit_status(result) == 2


def test_per_variant_overrides(small_spec):
    spec = small_spec(sweep={"overrides": {"slowmo": {"global_lr": 0.25, "n": 3}}})
    problem = make_problem(spec.problem, 3)
    cfg = cell_config(spec, "slowmo", 20, 0, problem)
    assert (cfg.global_lr, cfg.n) == (0.25, 3)
    trace, problem, cfg = simulate(spec, "slowmo", 20, 0)
    assert problem.n_workers == 3
    assert cell_config(spec, "dsm", 20, 0, make_problem(spec.problem, 2)).global_lr == 1.0


def test_bad_override_key_is_a_config_error(small_spec):
    spec = small_spec(sweep={"overrides": {"dsm": {"betaa1": 0.5}}})
    with pytest.raises(UnknownKeyError) as err:
        cell_config(spec, "dsm", 20, 0, make_problem(spec.problem, 2))
    assert err.value.field == "algorithm.betaa1"


def test_theorem1_prescription(small_spec):
    spec = small_spec(
        algorithm={"global_lr": 4.0, "sign": {"variant": "randomized_sparse", "direction_bound": 6.0}},
        sweep={"prescription": "theorem1"},
    )
    cfg = cell_config(spec, "dsm", 96, 0, make_problem(spec.problem, 2))
    assert cfg.local_lr.kind == "constant"
    assert cfg.local_lr.peak == pytest.approx(6.0 / 4.0 * math.sqrt(2 * 3 / 96))


def test_theorem3_prescription(small_spec):
    spec = small_spec(sweep={"prescription": "theorem3"})
    problem = make_problem(spec.problem, 2)
    cfg = cell_config(spec, "dsm", 256, 0, problem)
    L = problem.smoothness_upper_bound()
    assert cfg.global_lr == pytest.approx(1.0 / (L * 256**0.75))
    assert cfg.beta1 == cfg.beta2 == pytest.approx(1 - 1 / 16)


def test_cosine_schedule_is_stretched_to_each_horizon():
    s = Schedule(kind="cosine", peak=0.1, warmup_steps=5, total_steps=50)
    stretched = _rescaled_schedule(s, 50, 200)
    assert (stretched.warmup_steps, stretched.total_steps) == (20, 200)
    assert _rescaled_schedule(s, 50, 50) is s
    assert _rescaled_schedule(Schedule(peak=0.1), 50, 200).kind == "constant"


def test_rate_metrics(small_spec):
    spec = small_spec(sweep={"rate_metric": "inner_grad_sq"})
    trace, problem, _ = simulate(spec, "dsm", 10, 0)
    assert rate_metric(trace, "inner_grad_sq") == pytest.approx(trace.inner_grad_sq_average())
    assert rate_metric(trace, "grad_l2sq_average") == pytest.approx(trace.column("grad_l2sq")[:10].mean())
    assert rate_metric(trace, "grad_l1_running_min") <= trace.records[0].grad_l1
    assert 0 < gap_reduction(trace, problem) <= 1


def test_summary_of_nothing():
    table, slopes = summarize([])
    assert table.empty
    assert slopes == {}


def test_cell_names():
    assert cell_name("dsm", 256, 3) == "dsm_T256_seed3"
