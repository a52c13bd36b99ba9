"""Server update rules: FedAvg, BCRS and OPWA.

All three share one accumulation routine so that equal inputs give
bit-identical outputs regardless of which rule was called. Clients are summed
in the order given, which callers keep ascending by client index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, ParameterError
from .opwa import OverlapMask
from .params import SparseUpdate, as_vector

VARIANTS = ("fedavg", "bcrs", "opwa")


@dataclass(frozen=True)
class AggregationRule:
    variant: str = "fedavg"
    server_rate: float = 1.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ParameterError(f"unknown aggregation variant {self.variant!r}")
        if not self.server_rate > 0:
            raise ParameterError(f"server_rate must be positive, got {self.server_rate}")


def _weighted_step(
    w,
    updates: Sequence[SparseUpdate],
    coeffs: Sequence[float],
    server_rate: float,
    mask: OverlapMask | None = None,
) -> np.ndarray:
    w = as_vector(w)
    if len(updates) != len(coeffs):
        raise DimensionError(f"{len(updates)} updates vs {len(coeffs)} coefficients")
    acc = np.zeros_like(w)
    for u, c in zip(updates, coeffs):
        if u.dim != w.size:
            raise DimensionError(f"update dim {u.dim} != model dim {w.size}")
        if mask is not None:
            u = mask.apply(u)
        acc[u.indices] += c * u.values
    return w - server_rate * acc


def fedavg_aggregate(w, updates, f, server_rate: float = 1.0) -> np.ndarray:
    return _weighted_step(w, updates, f, server_rate)


def bcrs_aggregate(w, updates, p_prime, server_rate: float = 1.0) -> np.ndarray:
    return _weighted_step(w, updates, p_prime, server_rate)


def opwa_aggregate(w, updates, p_prime, mask: OverlapMask, server_rate: float = 1.0) -> np.ndarray:
    return _weighted_step(w, updates, p_prime, server_rate, mask)


def aggregate(rule: AggregationRule, w, updates, coeffs, mask: OverlapMask | None = None):
    if rule.variant == "opwa":
        if mask is None:
            raise ParameterError("opwa aggregation needs an overlap mask")
        return opwa_aggregate(w, updates, coeffs, mask, rule.server_rate)
    if rule.variant == "bcrs":
        return bcrs_aggregate(w, updates, coeffs, rule.server_rate)
    return fedavg_aggregate(w, updates, coeffs, rule.server_rate)
