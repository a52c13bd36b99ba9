"""Overlap-aware parameter weighting.

Counts how many selected clients kept each parameter index after
sparsification and boosts the rarely shared ones by an enlarge rate.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DimensionError, ParameterError
from .params import SparseUpdate

OverlapCounts = dict[int, int]


@dataclass(frozen=True)
class OverlapMask:
    """Index -> multiplier. Indices not present have multiplier 1."""

    multipliers: Mapping[int, float] = field(default_factory=dict)

    def __getitem__(self, index: int) -> float:
        return self.multipliers.get(int(index), 1.0)

    def apply(self, u: SparseUpdate) -> SparseUpdate:
        scale = np.array([self[i] for i in u.indices.tolist()], dtype=np.float64)
        return SparseUpdate(u.indices, u.values * scale, u.dim)


def compute_overlap(updates: Sequence[SparseUpdate]) -> OverlapCounts:
    if not updates:
        return {}
    dim = updates[0].dim
    counts: Counter[int] = Counter()
    for u in updates:
        if u.dim != dim:
            raise DimensionError(f"update dims differ: {u.dim} vs {dim}")
        counts.update(u.indices.tolist())
    return dict(sorted(counts.items()))


def generate_mask(counts: Mapping[int, int], d: int = 1, gamma: float = 1.0) -> OverlapMask:
    if d < 1:
        raise ParameterError(f"required overlap degree must be >= 1, got {d}")
    if gamma < 1:
        raise ParameterError(f"enlarge rate must be >= 1, got {gamma}")
    return OverlapMask({p: (gamma if c <= d else 1.0) for p, c in counts.items()})


def overlap_histogram(counts: Mapping[int, int], n_selected: int) -> list[tuple[int, float]]:
    """Fraction of retained indices at each overlap degree 1..n_selected."""
    if n_selected < 1:
        raise ParameterError(f"n_selected must be >= 1, got {n_selected}")
    if not counts:
        return []
    tally = Counter(counts.values())
    total = len(counts)
    return [(deg, tally.get(deg, 0) / total) for deg in range(1, n_selected + 1)]
