"""Client network profiles, upload-time model and per-round time metrics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ParameterError

MAX_REJECTIONS = 100


@dataclass(frozen=True)
class ClientProfile:
    bandwidth: float  # bits per second
    latency: float  # seconds
    n_samples: int = 1

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise ParameterError(f"bandwidth must be positive, got {self.bandwidth}")
        if not self.latency > 0:
            raise ParameterError(f"latency must be positive, got {self.latency}")
        if self.n_samples < 1:
            raise ParameterError(f"n_samples must be >= 1, got {self.n_samples}")


def _positive_normal(rng: np.random.Generator, mean: float, std: float) -> float:
    for _ in range(MAX_REJECTIONS):
        x = float(rng.normal(mean, std))
        if x > 0:
            return x
    return mean / 100.0


def sample_profiles(
    n: int,
    bw_mean: float,
    bw_std: float,
    lat_lo: float,
    lat_hi: float,
    sizes: Sequence[int],
    rng: np.random.Generator | int,
) -> list[ClientProfile]:
    """Draw ``n`` client profiles.

    Bandwidth is normal (resampled until positive), latency is uniform on
    ``(lat_lo, lat_hi]``.
    """
    if n < 1:
        raise ParameterError(f"need at least one client, got {n}")
    if not bw_mean > 0 or bw_std < 0:
        raise ParameterError("bandwidth mean must be positive and std non-negative")
    if not 0 < lat_lo < lat_hi:
        raise ParameterError(f"latency range must satisfy 0 < lo < hi, got ({lat_lo}, {lat_hi}]")
    if len(sizes) != n:
        raise ParameterError(f"expected {n} dataset sizes, got {len(sizes)}")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    profiles = []
    for i in range(n):
        bw = bw_mean if bw_std == 0 else _positive_normal(rng, bw_mean, bw_std)
        # 1 - U maps [0, 1) onto (0, 1], giving a half-open interval on the left
        lat = lat_lo + (1.0 - rng.random()) * (lat_hi - lat_lo)
        profiles.append(ClientProfile(bw, lat, int(sizes[i])))
    return profiles


def comm_time(profile: ClientProfile, payload: float) -> float:
    if payload < 0:
        raise ParameterError(f"payload must be non-negative, got {payload}")
    return profile.latency + payload / profile.bandwidth


@dataclass(frozen=True)
class RoundTimes:
    actual: float
    max: float
    min: float


@dataclass(frozen=True)
class TimeLedger:
    rounds: tuple[RoundTimes, ...] = ()
    cum_actual: float = 0.0
    cum_max: float = 0.0
    cum_min: float = 0.0

    @property
    def last(self) -> RoundTimes:
        return self.rounds[-1]


def record_round(
    ledger: TimeLedger,
    compressed_times: Sequence[float],
    reference_times: Sequence[float],
) -> TimeLedger:
    """Append one round and return the updated ledger.

    ``actual`` and ``min`` come from the compressed upload times, ``max`` from
    the uncompressed reference times.
    """
    if len(compressed_times) == 0 or len(reference_times) == 0:
        raise ParameterError("a round needs at least one client time")
    rt = RoundTimes(
        actual=float(max(compressed_times)),
        max=float(max(reference_times)),
        min=float(min(compressed_times)),
    )
    return TimeLedger(
        rounds=ledger.rounds + (rt,),
        cum_actual=ledger.cum_actual + rt.actual,
        cum_max=ledger.cum_max + rt.max,
        cum_min=ledger.cum_min + rt.min,
    )
