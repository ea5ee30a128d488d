import numpy as np

from src.core.rng import GLOBAL_WORKER, Phase, derive_stream


def test_same_key_reproduces_sequence():
    a = derive_stream(42, 3, 7, Phase.LOCAL).random(100)
    b = derive_stream(42, 3, 7, Phase.LOCAL).random(100)
    assert np.array_equal(a, b)


def test_stream_ids_are_injective():
    base = derive_stream(42, 0, 0, Phase.LOCAL)
    assert base.stream_id != derive_stream(42, 0, 1, Phase.LOCAL).stream_id
    assert base.stream_id != derive_stream(42, 1, 0, Phase.LOCAL).stream_id
    assert base.stream_id != derive_stream(42, 0, 0, Phase.SIGN).stream_id


def test_distinct_workers_give_distinct_first_draws():
    firsts = {derive_stream(9, w, 0, Phase.LOCAL).random() for w in range(10_000)}
    assert len(firsts) == 10_000


def test_distinct_seeds_and_global_worker():
    a = derive_stream(0, GLOBAL_WORKER, 0, Phase.SIGN).random(8)
    b = derive_stream(1, GLOBAL_WORKER, 0, Phase.SIGN).random(8)
    assert not np.array_equal(a, b)
