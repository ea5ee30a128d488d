import pytest

from src.reductions.suite import DEFAULT_SEEDS, IDENTITIES, certify, first_mismatch
from src.utils.exceptions import PreconditionError


@pytest.mark.parametrize("name", list(IDENTITIES))
def test_identity_holds_bitwise(name):
    certificate = certify(seeds=DEFAULT_SEEDS, identities=[name])
    assert certificate.passed, certificate.failures
    assert len(certificate.checks) == len(DEFAULT_SEEDS) * 3


def test_certificate_covers_every_identity():
    certificate = certify(seeds=(11,))
    assert {c.identity for c in certificate.checks} == set(IDENTITIES)
    assert certificate.passed


def test_unknown_identity():
    with pytest.raises(PreconditionError):
        certify(seeds=(0,), identities=["dsm_equals_adam"])


def test_first_mismatch():
    assert first_mismatch(["a", "b"], ["a", "b"]) is None
    assert first_mismatch(["a", "b"], ["a", "c"]) == 1
    assert first_mismatch(["a"], ["a", "b"]) == 1
