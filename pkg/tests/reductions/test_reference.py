import numpy as np
import pytest

from src.reductions.reference import GradientStream, ReferenceLoop, replay
from src.utils.exceptions import PreconditionError, StreamExhaustedError


@pytest.fixture
def stream():
    rng = np.random.default_rng(7)
    return GradientStream(directions=rng.standard_normal((12, 3)), gammas=np.full(12, 0.1))


def test_signsgd_without_momentum_is_sign_descent(stream):
    x0 = np.array([1.0, -1.0, 0.5])
    result = replay(ReferenceLoop(kind="signsgd_mom", x0=x0, lr=2.0, beta1=0.0), stream, 12)
    x = x0.copy()
    for s in range(12):
        x = x - 0.2 * np.sign(stream.directions[s])
        assert result.trajectory[s + 1].tobytes() == x.tobytes()
    assert len(result.trajectory) == 13


def test_unit_lookahead_reproduces_base_steps(stream):
    x0 = np.zeros(3)
    result = replay(ReferenceLoop(kind="lookahead", x0=x0, lr=1.0, beta1=0.0, beta2=0.0, tau=1), stream, 12)
    x = x0.copy()
    for s in range(12):
        x = x - 0.1 * stream.directions[s]
        assert result.trajectory[s + 1].tobytes() == x.tobytes()


def test_signed_lookahead_records_fast_weights(stream):
    result = replay(ReferenceLoop(kind="signed_lookahead", x0=np.zeros(3), tau=4), stream, 12)
    assert len(result.trajectory) == 4
    assert len(result.fast_trajectory) == 13
    # one signed step of size lr * gamma per component
    assert np.allclose(np.abs(result.trajectory[1]), 0.1)


def test_lion_decay_pulls_towards_zero():
    stream = GradientStream(directions=np.zeros((5, 2)), gammas=np.full(5, 0.1))
    result = replay(ReferenceLoop(kind="lion", x0=np.array([1.0, -1.0]), weight_decay=0.5), stream, 5)
    assert np.all(np.abs(result.x_final) < 1.0)


def test_zero_rate_steps_are_skipped():
    stream = GradientStream(directions=np.ones((3, 1)), gammas=np.zeros(3))
    result = replay(ReferenceLoop(kind="signsgd_mom", x0=np.array([2.0])), stream, 3)
    assert result.x_final.tolist() == [2.0]


def test_exhausted_stream(stream):
    with pytest.raises(StreamExhaustedError) as err:
        replay(ReferenceLoop(kind="lion", x0=np.zeros(3)), stream, 13)
    assert err.value.exit_code == 2


def test_lookahead_replays_whole_rounds(stream):
    with pytest.raises(PreconditionError):
        replay(ReferenceLoop(kind="lookahead", x0=np.zeros(3), tau=5), stream, 12)
