import pytest
from pydantic import ValidationError

from src.core.schedules import Schedule
from src.engine.config import VARIANTS, FedMVConfig, HyperConfig, SignConfig, check_variant
from src.utils.exceptions import OutOfRangeError, UnknownVariantError


def test_lion_style_defaults():
    cfg = HyperConfig()
    assert (cfg.beta1, cfg.beta2, cfg.weight_decay) == (0.95, 0.98, 0.1)
    assert cfg.slowmo.beta == 0.5
    assert cfg.slowmo.alpha == 1.0


def test_pretraining_shape_is_echoed():
    cfg = HyperConfig(variant="dsm", tau=12, n=8)
    assert (cfg.variant, cfg.tau, cfg.n) == ("dsm", 12, 8)


def test_unknown_variant():
    with pytest.raises(UnknownVariantError) as err:
        HyperConfig(variant="sgdm")
    assert err.value.value == "sgdm"
    with pytest.raises(UnknownVariantError):
        check_variant("lamb")
    assert all(check_variant(v) == v for v in VARIANTS)


def test_unknown_key_is_rejected():
    with pytest.raises(ValidationError):
        HyperConfig(betaa1=0.9)


def test_work_budget():
    with pytest.raises(OutOfRangeError):
        HyperConfig(n=100, tau=100, rounds=100, max_work=10_000)


def test_schedule_must_cover_every_round():
    with pytest.raises(ValidationError):
        HyperConfig(rounds=50, local_lr=Schedule(kind="cosine", peak=0.1, total_steps=10))


def test_fedmv_needs_vote_bound():
    with pytest.raises(ValidationError):
        HyperConfig(variant="fedmv")
    assert HyperConfig(variant="fedmv", fedmv=FedMVConfig(bound_B=2.0)).fedmv_sign_mode.bound_B == 2.0


def test_global_adamw_needs_betas_below_one():
    with pytest.raises(ValidationError):
        HyperConfig(variant="global_adamw", beta2=1.0)


def test_randomized_sign_bound_scales_with_tau():
    cfg = HyperConfig(tau=4, sign=SignConfig(variant="randomized_sparse", direction_bound=1.5))
    assert cfg.sign_mode.variant == "randomized_sparse"
    assert cfg.sign_mode.bound_B == 6.0
    assert not HyperConfig().sign_mode.randomized
    with pytest.raises(ValidationError):
        SignConfig(variant="randomized_bipolar")
