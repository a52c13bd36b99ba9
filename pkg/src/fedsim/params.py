"""Dense and sparse parameter vectors.

Dense vectors are plain 1-D ``float64`` numpy arrays. A model's parameters are
always flattened into one such vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

WIRE_BITS = 32


def as_vector(values) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionError(f"expected a 1-D vector, got shape {v.shape}")
    return v


def compute_update(w_global, w_local) -> np.ndarray:
    """Return ``w_global - w_local``, the update a client sends back."""
    a = as_vector(w_global)
    b = as_vector(w_local)
    if a.shape != b.shape:
        raise DimensionError(f"length mismatch: {a.size} vs {b.size}")
    return a - b


@dataclass(frozen=True)
class SparseUpdate:
    """Retained entries of a compressed update.

    ``indices`` is strictly increasing and every index is below ``dim``.
    """

    indices: np.ndarray
    values: np.ndarray
    dim: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        vals = np.asarray(self.values, dtype=np.float64)
        if idx.ndim != 1 or vals.ndim != 1 or idx.size != vals.size:
            raise DimensionError("indices and values must be 1-D and of equal length")
        if self.dim < 0:
            raise DimensionError(f"negative dim {self.dim}")
        if idx.size:
            if idx[0] < 0 or idx[-1] >= self.dim:
                raise DimensionError(f"index out of range for dim {self.dim}")
            if np.any(np.diff(idx) <= 0):
                raise DimensionError("indices must be strictly increasing")
        idx.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "dim", int(self.dim))

    @property
    def k(self) -> int:
        return int(self.indices.size)

    @classmethod
    def from_dense(cls, v) -> "SparseUpdate":
        v = as_vector(v)
        return cls(np.arange(v.size), v.copy(), v.size)


def densify(u: SparseUpdate) -> np.ndarray:
    out = np.zeros(u.dim, dtype=np.float64)
    if u.k and u.indices[-1] >= u.dim:
        raise DimensionError(f"index {u.indices[-1]} >= dim {u.dim}")
    out[u.indices] = u.values
    return out


def payload_bits(u: SparseUpdate) -> int:
    """Wire size of ``u``: index+value pairs, or a bare dense vector when full."""
    if u.k >= u.dim:
        return WIRE_BITS * u.dim
    return 2 * WIRE_BITS * u.k


def dense_bits(dim: int) -> int:
    return WIRE_BITS * dim
