"""Experiment configuration: a flat JSON object with a fixed key set."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .errors import ParameterError, SchemaError

ALGORITHMS = ("fedavg", "topk", "eftopk", "bcrs", "bcrs_opwa")


@dataclass(frozen=True)
class ExperimentConfig:
    algorithm: str = "bcrs_opwa"
    n_clients: int = 10
    participation: float = 0.5
    rounds: int = 200
    epochs: int = 1
    batch_size: int = 64
    lr: float = 0.01
    alpha: float = 0.3
    gamma: float = 1.0
    overlap_degree: int = 1
    cr: float = 0.1
    beta: float = 0.5
    seed: int = 0
    # model
    model: str = "mlp"
    hidden_units: int = 32
    # data: synthetic unless csv_path is set
    csv_path: str | None = None
    n_samples: int = 3000
    n_features: int = 20
    n_classes: int = 10
    class_sep: float = 2.0
    test_fraction: float = 0.2
    # network
    bw_mean: float = 1e6
    bw_std: float = 0.2e6
    lat_lo: float = 0.05
    lat_hi: float = 0.2
    server_rate: float = 1.0
    ef: bool | None = None
    workers: int = 1
    # outputs
    metrics_csv: str | None = None
    overlap_csv: str | None = None
    model_out: str | None = None

    def __post_init__(self):
        self.validate()

    @property
    def n_selected(self) -> int:
        return math.floor(self.n_clients * self.participation)

    @property
    def use_ef(self) -> bool:
        if self.algorithm == "eftopk":
            return True
        if self.ef is None:
            return False
        return bool(self.ef)

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ParameterError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if not 0 < self.participation <= 1:
            raise ParameterError(f"participation must be in (0, 1], got {self.participation}")
        if self.n_clients < 1 or self.n_selected < 1:
            raise ParameterError("n_clients * participation must select at least one client")
        if self.rounds < 1:
            raise ParameterError(f"rounds must be >= 1, got {self.rounds}")
        if self.epochs < 0 or self.batch_size < 1:
            raise ParameterError("epochs must be >= 0 and batch_size >= 1")
        for name in ("lr", "alpha", "server_rate", "beta", "bw_mean"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive")
        if not 0 < self.cr <= 1:
            raise ParameterError(f"cr must be in (0, 1], got {self.cr}")
        if self.gamma < 1 or self.overlap_degree < 1:
            raise ParameterError("gamma must be >= 1 and overlap_degree >= 1")
        if self.bw_std < 0 or not 0 < self.lat_lo < self.lat_hi:
            raise ParameterError("need bw_std >= 0 and 0 < lat_lo < lat_hi")
        if self.workers < 1:
            raise ParameterError("workers must be >= 1")

    def replace(self, **changes: Any) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


FIELDS = {f.name for f in dataclasses.fields(ExperimentConfig)}


def config_from_dict(raw: dict[str, Any]) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise SchemaError("config must be a JSON object")
    unknown = sorted(set(raw) - FIELDS)
    if unknown:
        raise SchemaError(f"unknown config keys: {', '.join(unknown)}")
    return ExperimentConfig(**raw)


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None
    return config_from_dict(raw)
