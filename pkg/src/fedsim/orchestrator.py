"""The server loop: client sampling, local training, compression, aggregation."""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import rng as streams
from .aggregation import AggregationRule, aggregate
from .bcrs import RoundPlan, benchmark_time, normalize_ratios, plan_round
from .compression import CompressorState, ef_topk_sparsify, topk_sparsify
from .config import ExperimentConfig
from .data import (
    Dataset,
    dirichlet_partition,
    load_csv_dataset,
    synth_classification,
    train_test_split,
)
from .errors import FedSimError, ParameterError
from .learner import ModelSpec, TrainConfig, evaluate, init_params, local_train
from .netsim import ClientProfile, TimeLedger, comm_time, record_round, sample_profiles
from .opwa import compute_overlap, generate_mask, overlap_histogram
from .params import SparseUpdate, dense_bits

log = logging.getLogger(__name__)

METRIC_COLUMNS = (
    "round",
    "algorithm",
    "test_acc",
    "train_loss",
    "actual_time",
    "max_time",
    "min_time",
    "cum_actual",
    "cum_max",
    "cum_min",
)
OVERLAP_COLUMNS = ("round", "degree", "fraction")

# (selected, profiles, f, v_bits, config) -> plan
Planner = Callable[[Sequence[int], Sequence[ClientProfile], Sequence[float], float, ExperimentConfig], RoundPlan]


@dataclass
class RoundReport:
    round: int
    algorithm: str
    test_acc: float
    train_loss: float
    actual_time: float
    max_time: float
    min_time: float
    cum_actual: float
    cum_max: float
    cum_min: float
    selected: tuple[int, ...] = ()
    ratios: tuple[float, ...] = ()
    boosted_fraction: float = 0.0
    histogram: list[tuple[int, float]] = field(default_factory=list)

    def csv_row(self) -> list[str]:
        row = [str(self.round), self.algorithm]
        row += [fmt(getattr(self, c)) for c in METRIC_COLUMNS[2:]]
        return row


def fmt(x: float) -> str:
    return f"{x:.9g}"


@dataclass
class SimState:
    config: ExperimentConfig
    spec: ModelSpec
    train: Dataset
    test: Dataset
    partition: list[list[int]]
    clients: list[Dataset]
    profiles: list[ClientProfile]
    w: np.ndarray
    residuals: list[CompressorState]
    round: int = 0
    ledger: TimeLedger = field(default_factory=TimeLedger)


def select_clients(n: int, c: float, rng: np.random.Generator) -> list[int]:
    """Uniform sample of ``floor(n * c)`` clients, returned in ascending order."""
    if not 0 < c <= 1:
        raise ParameterError(f"participation must be in (0, 1], got {c}")
    m = math.floor(n * c)
    if m < 1:
        raise ParameterError(f"floor({n} * {c}) selects no clients")
    return sorted(int(i) for i in rng.choice(n, size=m, replace=False))


def load_dataset(cfg: ExperimentConfig) -> Dataset:
    if cfg.csv_path:
        return load_csv_dataset(cfg.csv_path)
    return synth_classification(
        cfg.n_samples, cfg.n_features, cfg.n_classes, cfg.class_sep,
        streams.stream(cfg.seed, streams.DATA),
    )


def init_state(cfg: ExperimentConfig) -> SimState:
    ds = load_dataset(cfg)
    train, test = train_test_split(ds, cfg.test_fraction, streams.stream(cfg.seed, streams.SPLIT))
    partition = dirichlet_partition(
        train.labels, cfg.n_clients, cfg.beta, streams.stream(cfg.seed, streams.PARTITION)
    )
    clients = [train.subset(idx) for idx in partition]
    profiles = sample_profiles(
        cfg.n_clients, cfg.bw_mean, cfg.bw_std, cfg.lat_lo, cfg.lat_hi,
        [len(c) for c in clients], streams.stream(cfg.seed, streams.PROFILES),
    )
    spec = ModelSpec(cfg.model, ds.n_features, ds.n_classes, cfg.hidden_units if cfg.model == "mlp" else 0)
    w = init_params(spec, streams.stream(cfg.seed, streams.INIT))
    residuals = [CompressorState.zeros(spec.n_params) for _ in range(cfg.n_clients)]
    return SimState(cfg, spec, train, test, partition, clients, profiles, w, residuals)


def uniform_plan(selected, profiles, f, v_bits, cfg: ExperimentConfig) -> RoundPlan:
    cr = 1.0 if cfg.algorithm == "fedavg" else cfg.cr
    t_bench, _ = benchmark_time([profiles[i] for i in selected], v_bits, cr)
    ratios = (cr,) * len(selected)
    return RoundPlan(tuple(selected), ratios, tuple(normalize_ratios(ratios)), tuple(f), t_bench)


def scheduled_plan(selected, profiles, f, v_bits, cfg: ExperimentConfig) -> RoundPlan:
    return plan_round(selected, profiles, f, v_bits, cfg.cr, cfg.alpha)


def default_planner(cfg: ExperimentConfig) -> Planner:
    return scheduled_plan if cfg.algorithm in ("bcrs", "bcrs_opwa") else uniform_plan


def nominal_payload(cr: float, dim: int) -> float:
    """Bits charged for an upload at ratio ``cr``.

    Below 1 this is the index+value cost ``2 * V * cr`` used by the scheduler;
    at 1 the update goes out dense.
    """
    v_bits = dense_bits(dim)
    return v_bits if cr >= 1.0 else 2.0 * v_bits * cr


def _aggregation_rule(cfg: ExperimentConfig) -> AggregationRule:
    variant = {"bcrs": "bcrs", "bcrs_opwa": "opwa"}.get(cfg.algorithm, "fedavg")
    return AggregationRule(variant, cfg.server_rate)


def run_round(
    state: SimState, planner: Planner | None = None, pool: ThreadPoolExecutor | None = None
) -> tuple[SimState, RoundReport]:
    """Execute one synchronous round. ``state`` is updated in place and returned."""
    cfg = state.config
    t = state.round
    dim = state.spec.n_params
    v_bits = dense_bits(dim)

    selected = select_clients(cfg.n_clients, cfg.participation, streams.stream(cfg.seed, streams.SELECTION, t))
    sizes = [len(state.clients[i]) for i in selected]
    total = sum(sizes)
    f = [n / total for n in sizes]
    plan = (planner or default_planner(cfg))(selected, state.profiles, f, v_bits, cfg)

    train_cfg = TrainConfig(cfg.epochs, cfg.batch_size, cfg.lr)
    w_t = state.w

    def train_one(i: int) -> np.ndarray:
        return local_train(w_t, state.spec, state.clients[i], train_cfg, streams.stream(cfg.seed, streams.SHUFFLE, i, t))

    if pool is not None:
        deltas = list(pool.map(train_one, selected))
    else:
        deltas = [train_one(i) for i in selected]

    updates: list[SparseUpdate] = []
    for i, delta, cr in zip(selected, deltas, plan.ratios):
        if cfg.use_ef:
            u, state.residuals[i] = ef_topk_sparsify(delta, cr, state.residuals[i])
        else:
            u = topk_sparsify(delta, cr)
        updates.append(u)

    counts = compute_overlap(updates)
    histogram = overlap_histogram(counts, len(selected))
    mask = None
    boosted = 0.0
    if cfg.algorithm == "bcrs_opwa":
        mask = generate_mask(counts, cfg.overlap_degree, cfg.gamma)
        if counts:
            boosted = sum(1 for c in counts.values() if c <= cfg.overlap_degree) / len(counts)

    state.w = aggregate(_aggregation_rule(cfg), w_t, updates, plan.coefficients, mask)

    chosen = [state.profiles[i] for i in selected]
    compressed = [comm_time(p, nominal_payload(cr, dim)) for p, cr in zip(chosen, plan.ratios)]
    reference = [comm_time(p, v_bits) for p in chosen]
    state.ledger = record_round(state.ledger, compressed, reference)

    test_acc, _ = evaluate(state.w, state.spec, state.test)
    _, train_loss = evaluate(state.w, state.spec, state.train)
    last = state.ledger.last
    report = RoundReport(
        round=t,
        algorithm=cfg.algorithm,
        test_acc=test_acc,
        train_loss=train_loss,
        actual_time=last.actual,
        max_time=last.max,
        min_time=last.min,
        cum_actual=state.ledger.cum_actual,
        cum_max=state.ledger.cum_max,
        cum_min=state.ledger.cum_min,
        selected=tuple(selected),
        ratios=tuple(plan.ratios),
        boosted_fraction=boosted,
        histogram=histogram,
    )
    state.round += 1
    return state, report


class _CsvSink:
    def __init__(self, path: str | None, header: Iterable[str]):
        self.path = path
        self._fh = None
        if path is None:
            return
        try:
            Path(path).parent.mkdir(parents=True, exist_ok=True)
            self._fh = open(path, "w", newline="")
        except OSError as exc:
            raise FedSimError(f"cannot open {path} for writing: {exc}") from exc
        self._writer = csv.writer(self._fh, lineterminator="\n")
        self.write(header)

    def write(self, row: Iterable[str]) -> None:
        if self._fh is None:
            return
        try:
            self._writer.writerow(row)
            self._fh.flush()
        except OSError as exc:
            raise FedSimError(f"write to {self.path} failed: {exc}") from exc

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()


def run_experiment(
    cfg: ExperimentConfig,
    planner: Planner | None = None,
    on_round: Callable[[SimState, RoundReport], None] | None = None,
) -> list[RoundReport]:
    """Run ``cfg.rounds`` rounds, streaming metrics to the configured CSV files."""
    state = init_state(cfg)
    metrics = _CsvSink(cfg.metrics_csv, METRIC_COLUMNS)
    overlap = _CsvSink(cfg.overlap_csv, OVERLAP_COLUMNS)
    pool = ThreadPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    reports = []
    try:
        for _ in range(cfg.rounds):
            state, report = run_round(state, planner, pool)
            reports.append(report)
            metrics.write(report.csv_row())
            for degree, frac in report.histogram:
                overlap.write([str(report.round), str(degree), fmt(frac)])
            if on_round is not None:
                on_round(state, report)
            log.info(
                "round %d acc=%.4f loss=%.4f t=%.3fs",
                report.round, report.test_acc, report.train_loss, report.actual_time,
            )
    finally:
        metrics.close()
        overlap.close()
        if pool is not None:
            pool.shutdown()
    if cfg.model_out:
        try:
            np.save(cfg.model_out, state.w)
        except OSError as exc:
            raise FedSimError(f"cannot save model to {cfg.model_out}: {exc}") from exc
    return reports


def rounds_to_target(reports: Sequence[RoundReport], target: float) -> int | None:
    """Number of rounds until test accuracy first reaches ``target``."""
    for r in reports:
        if r.test_acc >= target:
            return r.round + 1
    return None
