"""
Deterministic random streams.

Every random draw in a run comes from a stream keyed by
(base_seed, worker_id, round, phase). Streams are built from a numpy
SeedSequence over that key, so distinct keys give independent PCG64
generators and equal keys reproduce the same sequence regardless of the
order in which workers execute.
"""

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Tuple

import numpy as np

# Worker id used for draws owned by the global (server-side) step.
GLOBAL_WORKER = 2**32 - 1


class Phase(IntEnum):
    LOCAL = 0
    SIGN = 1
    FEDMV_SAMPLE = 2
    ESTIMATE = 3
    STRUCTURE = 4
    INIT = 5
    LEMMA = 6


@dataclass
class RngStream:
    base_seed: int
    stream_id: Tuple[int, int, int]
    generator: np.random.Generator = field(repr=False)

    def random(self, size=None):
        return self.generator.random(size)

    def standard_normal(self, size=None):
        return self.generator.standard_normal(size)

    def integers(self, low, high=None, size=None):
        return self.generator.integers(low, high, size=size)


def derive_stream(base_seed: int, worker_id: int, round_index: int, phase: Phase | int) -> RngStream:
    stream_id = (int(worker_id), int(round_index), int(phase))
    seq = np.random.SeedSequence([int(base_seed) & (2**64 - 1), *stream_id])
    return RngStream(
        base_seed=int(base_seed),
        stream_id=stream_id,
        generator=np.random.Generator(np.random.PCG64(seq)),
    )
