"""Bandwidth-aware compression ratio scheduling.

The slowest selected client at the default ratio sets a benchmark upload
time; every other client gets the ratio that makes its upload finish at that
benchmark. Averaging coefficients are then rescaled by the normalized ratios.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, ParameterError, SchedulingError
from .netsim import ClientProfile


@dataclass(frozen=True)
class RoundPlan:
    selected: tuple[int, ...]
    ratios: tuple[float, ...]
    norm_ratios: tuple[float, ...]
    coefficients: tuple[float, ...]
    t_bench: float


def benchmark_time(
    profiles: Sequence[ClientProfile], v_bits: float, cr_default: float
) -> tuple[float, int]:
    """Return the slowest post-compression upload time and its position."""
    if len(profiles) == 0:
        raise ParameterError("no clients selected")
    if not 0.0 < cr_default <= 1.0:
        raise ParameterError(f"default ratio must be in (0, 1], got {cr_default}")
    if not v_bits > 0:
        raise ParameterError(f"model size must be positive, got {v_bits}")
    t_max, idx_max = -np.inf, 0
    for i, p in enumerate(profiles):
        t = p.latency + 2.0 * v_bits * cr_default / p.bandwidth
        if t > t_max:
            t_max, idx_max = t, i
    return float(t_max), idx_max


def schedule_ratios(
    profiles: Sequence[ClientProfile],
    v_bits: float,
    t_bench: float,
    cr_floor: float | None = None,
) -> list[float]:
    """Per-client ratio so that ``L_i + 2 V CR_i / B_i == t_bench``, capped at 1.

    ``cr_floor`` is the default ratio the benchmark was computed with. Every
    ratio is at least that in exact arithmetic; passing it absorbs the rounding
    on the way back through the formula.
    """
    ratios = []
    for i, p in enumerate(profiles):
        if t_bench <= p.latency:
            raise SchedulingError(
                f"client {i}: benchmark time {t_bench} does not exceed latency {p.latency}"
            )
        cr = (t_bench - p.latency) / (2.0 * v_bits) * p.bandwidth
        if cr_floor is not None:
            cr = max(cr, cr_floor)
        ratios.append(min(cr, 1.0))
    return ratios


def normalize_ratios(ratios: Sequence[float]) -> list[float]:
    r = np.asarray(ratios, dtype=np.float64)
    if r.size == 0 or np.any(r <= 0):
        raise ParameterError("ratios must be positive")
    return list(r / r.sum())


def client_coefficients(
    f: Sequence[float], norm_ratios: Sequence[float], alpha: float
) -> list[float]:
    """Adjusted averaging weights ``f_i / max(f_i, norm_i) * alpha``."""
    if len(f) != len(norm_ratios):
        raise DimensionError(f"{len(f)} data fractions vs {len(norm_ratios)} ratios")
    if not alpha > 0:
        raise ParameterError(f"alpha must be positive, got {alpha}")
    return [fi / max(fi, ni) * alpha for fi, ni in zip(f, norm_ratios)]


def plan_round(
    selected: Sequence[int],
    profiles: Sequence[ClientProfile],
    f: Sequence[float],
    v_bits: float,
    cr_default: float,
    alpha: float,
) -> RoundPlan:
    """Run the full scheduling pipeline for one round's selected clients."""
    chosen = [profiles[i] for i in selected]
    t_bench, _ = benchmark_time(chosen, v_bits, cr_default)
    ratios = schedule_ratios(chosen, v_bits, t_bench, cr_default)
    norm = normalize_ratios(ratios)
    coeffs = client_coefficients(f, norm, alpha)
    return RoundPlan(tuple(selected), tuple(ratios), tuple(norm), tuple(coeffs), t_bench)
