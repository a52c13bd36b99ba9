"""Magnitude Top-K sparsification, plain and with error feedback."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParameterError
from .params import SparseUpdate, as_vector, densify


def retained_count(n: int, cr: float) -> int:
    return max(1, math.floor(cr * n))


def topk_sparsify(v, cr: float) -> SparseUpdate:
    """Keep the ``max(1, floor(cr * n))`` largest-magnitude entries of ``v``.

    Ties in magnitude go to the lower index. Retained values are copied
    unchanged.
    """
    v = as_vector(v)
    if v.size == 0:
        raise DimensionError("cannot sparsify an empty vector")
    if not 0.0 < cr <= 1.0:
        raise ParameterError(f"compression ratio must be in (0, 1], got {cr}")
    k = retained_count(v.size, cr)
    if k >= v.size:
        return SparseUpdate.from_dense(v)
    # stable sort keeps ascending index order among equal magnitudes
    order = np.argsort(-np.abs(v), kind="stable")
    idx = np.sort(order[:k])
    return SparseUpdate(idx, v[idx], v.size)


@dataclass
class CompressorState:
    """Per-client error-feedback accumulator."""

    residual: np.ndarray

    @classmethod
    def zeros(cls, dim: int) -> "CompressorState":
        return cls(np.zeros(dim, dtype=np.float64))


def ef_topk_sparsify(v, cr: float, state: CompressorState) -> tuple[SparseUpdate, CompressorState]:
    v = as_vector(v)
    if state.residual.shape != v.shape:
        raise DimensionError(
            f"residual has length {state.residual.size}, update has {v.size}"
        )
    corrected = v + state.residual
    out = topk_sparsify(corrected, cr)
    return out, CompressorState(corrected - densify(out))
