"""Desk-scale experiments; deselected by default, run with `pytest -m slow`."""

from pathlib import Path

import pandas as pd
import pytest

from src.cli.checks import check_lemma1, check_theorems
from src.cli.config import apply_overrides, parse_config
from src.cli.runner import exit_status, run_experiment
from src.reductions.suite import certify

pytestmark = pytest.mark.slow

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

GAP_REDUCTION = 0.9
JOBS = 4


def test_randomized_sign_lemma_at_full_scale():
    report = check_lemma1()
    assert report.passed, [c for c in report.checks if not c.passed]
    assert len(report.checks) == 20


def test_reduction_identities_over_five_seeds():
    certificate = certify()
    assert certificate.passed, certificate.failures
    assert len(certificate.checks) >= 6 * 3 * 5


def test_randomized_sign_rate():
    report = check_theorems(apply_overrides(parse_config(CONFIGS / "theorem2_rate.toml"), jobs=JOBS))
    assert report.slope_ok, report.slope
    assert all(h.within_bound for h in report.horizons), [(h.measured, h.bound) for h in report.horizons]
    assert report.momentum_ok


def test_hard_sign_rate_and_speedup():
    report = check_theorems(apply_overrides(parse_config(CONFIGS / "theorem3_rate.toml"), jobs=JOBS))
    assert report.slope_ok, report.slope
    assert report.speedup_ok, report.speedup
    single, many = report.speedup
    assert (single.n, single.tau, many.n, many.tau) == (1, 1, 8, 4)
    assert many.final_grad_l1 < single.final_grad_l1


def test_baselines_close_the_gap(tmp_path):
    spec = apply_overrides(parse_config(CONFIGS / "baselines.toml"), out=str(tmp_path), jobs=JOBS)
    result = run_experiment(spec, "run_acceptance")
    assert exit_status(result) == 0
    for cell in result.cells:
        assert cell.gap_reduction >= GAP_REDUCTION, cell
    summary = pd.read_csv(result.summary_path)
    assert sorted(summary["variant"]) == sorted(spec.variants)
