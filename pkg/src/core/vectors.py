"""
Dense parameter vectors.

A ParamVector is a one-dimensional float64 numpy array. Reductions that
feed traces or comparisons go through this module so that their summation
order is fixed: means run over inputs in index order and scalar reductions
use `math.fsum`, which is correctly rounded and therefore independent of
how numpy would have blocked the sum.
"""

import hashlib
import math
from typing import Iterable, Sequence

import numpy as np
import numpy.typing as npt

from src.utils.exceptions import NumericalAbortError, PreconditionError

ParamVector = npt.NDArray[np.float64]


def as_param_vector(values: Iterable[float] | np.ndarray) -> ParamVector:
    """Copy `values` into a fresh finite float64 vector of length >= 1."""
    v = np.array(values, dtype=np.float64, copy=True).reshape(-1)
    if v.size == 0:
        raise PreconditionError("Parameter vectors need at least one component", field="d", value=0)
    if not np.all(np.isfinite(v)):
        raise PreconditionError("Parameter vector has non-finite components", field="values")
    return v


def zeros(dim: int) -> ParamVector:
    return np.zeros(dim, dtype=np.float64)


def ensure_finite(v: ParamVector, round_index: int, what: str = "parameters") -> ParamVector:
    if not np.all(np.isfinite(v)):
        raise NumericalAbortError(round_index, reason=f"{what} became NaN/Inf")
    return v


def mean_vectors(vectors: Sequence[ParamVector]) -> ParamVector:
    """
    Componentwise mean in index-ascending order.

    Computed as x_0 + (sum_i (x_i - x_0)) / n so that the mean of identical
    vectors, and of a single vector, is that vector bitwise.
    """
    if len(vectors) == 0:
        raise PreconditionError("Cannot average an empty list of vectors", field="xs", value=0)
    anchor = vectors[0]
    acc = np.zeros_like(anchor)
    for v in vectors:
        if v.shape != anchor.shape:
            raise PreconditionError(
                "All vectors must have the same length",
                field="xs",
                value=int(v.shape[0]),
                constraint=f"length {anchor.shape[0]}",
            )
        acc += v - anchor
    return anchor + acc / len(vectors)


def dot(a: ParamVector, b: ParamVector) -> float:
    return math.fsum((a * b).tolist())


def norm_l2_sq(v: ParamVector) -> float:
    return math.fsum((v * v).tolist())


def norm_l2(v: ParamVector) -> float:
    return math.sqrt(norm_l2_sq(v))


def norm_l1(v: ParamVector) -> float:
    return math.fsum(np.abs(v).tolist())


def content_hash(v: ParamVector) -> str:
    """64-bit content hash of the raw float64 bytes, as 16 hex digits."""
    return hashlib.blake2b(np.ascontiguousarray(v, dtype=np.float64).tobytes(), digest_size=8).hexdigest()
