from pathlib import Path

import pytest

from src.cli.schemas import ExperimentSpec

CONFIGS = Path(__file__).resolve().parents[2] / "configs"


@pytest.fixture
def configs_dir() -> Path:
    return CONFIGS


@pytest.fixture
def small_spec(tmp_path):
    """Two variants x three seeds on a small noisy quadratic, written under tmp_path."""
    def factory(**blocks):
        data = {
            "name": "small",
            "problem": {"kind": "quadratic", "dim": 8, "noise_sigma": 0.3, "heterogeneity": 0.5, "structural_seed": 2},
            "algorithm": {
                "variant": "dsm",
                "n": 2,
                "tau": 3,
                "rounds": 20,
                "local_lr": {"peak": 0.05},
                "weight_decay": 0.0,
            },
            "sweep": {"variants": ["dsm", "slowmo"], "seeds": 3},
            "output": {"directory": str(tmp_path / "out"), "formats": ["csv"]},
        }
        for key, value in blocks.items():
            data[key] = {**data.get(key, {}), **value} if isinstance(value, dict) else value
        return ExperimentSpec.model_validate(data)
    return factory
