"""Datasets, synthetic generation and Dirichlet label-skew partitioning."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DimensionError, ParameterError, ParseError, SchemaError


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray  # (n_samples, n_features)
    labels: np.ndarray  # (n_samples,)
    n_classes: int

    def __post_init__(self):
        x = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels, dtype=np.int64)
        if x.ndim != 2 or y.ndim != 1 or x.shape[0] != y.shape[0]:
            raise DimensionError(f"features {x.shape} and labels {y.shape} disagree")
        if y.size and (y.min() < 0 or y.max() >= self.n_classes):
            raise ParameterError(f"labels must lie in [0, {self.n_classes})")
        if not np.all(np.isfinite(x)):
            raise ParameterError("features must be finite")
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", y)

    def __len__(self) -> int:
        return int(self.labels.size)

    @property
    def n_features(self) -> int:
        return int(self.features.shape[1])

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[idx], self.labels[idx], self.n_classes)


Partition = list[list[int]]


def sample_dirichlet(beta: float, k: int, rng: np.random.Generator) -> np.ndarray:
    """Symmetric Dirichlet(beta) draw of length ``k`` via normalized gammas."""
    if not beta > 0:
        raise ParameterError(f"beta must be positive, got {beta}")
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    g = rng.gamma(beta, 1.0, size=k)
    total = g.sum()
    if total == 0.0:
        # every draw underflowed; only possible for tiny beta
        g = np.zeros(k)
        g[rng.integers(k)] = 1.0
        total = 1.0
    return g / total


def _largest_remainder(props: np.ndarray, total: int) -> np.ndarray:
    raw = props * total
    counts = np.floor(raw).astype(np.int64)
    short = total - int(counts.sum())
    if short > 0:
        frac = raw - counts
        # larger remainder first, lower index on ties
        order = np.lexsort((np.arange(frac.size), -frac))
        counts[order[:short]] += 1
    return counts


def dirichlet_partition(
    labels: Sequence[int], n_clients: int, beta: float, rng: np.random.Generator | int
) -> Partition:
    """Split sample indices across clients with per-class Dirichlet proportions."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    y = np.asarray(labels, dtype=np.int64)
    if n_clients < 1:
        raise ParameterError(f"n_clients must be >= 1, got {n_clients}")
    if n_clients > y.size:
        raise ParameterError(f"{n_clients} clients but only {y.size} samples")
    parts: Partition = [[] for _ in range(n_clients)]
    for cls in np.unique(y):
        members = np.flatnonzero(y == cls)
        rng.shuffle(members)
        props = sample_dirichlet(beta, n_clients, rng)
        counts = _largest_remainder(props, members.size)
        start = 0
        for c, cnt in enumerate(counts):
            parts[c].extend(members[start : start + cnt].tolist())
            start += cnt
    for c in range(n_clients):
        parts[c].sort()
    while True:
        empty = [c for c in range(n_clients) if not parts[c]]
        if not empty:
            break
        donor = max(range(n_clients), key=lambda c: (len(parts[c]), -c))
        parts[empty[0]].append(parts[donor].pop())
    return parts


def partition_summary(labels: Sequence[int], partition: Partition, n_classes: int) -> dict:
    y = np.asarray(labels, dtype=np.int64)
    return {
        str(c): np.bincount(y[idx], minlength=n_classes).tolist()
        for c, idx in enumerate(partition)
    }


def label_entropy(counts: Sequence[int]) -> float:
    """Shannon entropy (nats) of a class-count vector."""
    c = np.asarray(counts, dtype=np.float64)
    p = c[c > 0] / c.sum()
    return float(-(p * np.log(p)).sum())


def synth_classification(
    n_samples: int,
    n_features: int,
    n_classes: int,
    class_sep: float,
    rng: np.random.Generator | int,
) -> Dataset:
    """Balanced Gaussian blobs, one per class, with unit-variance noise.

    Class ``c < n_features`` is centred on ``class_sep / sqrt(2) * e_c`` so the
    first centres sit exactly ``class_sep`` apart; further classes use random
    directions of the same length.
    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    if n_classes < 2 or n_features < 1 or n_samples < n_classes:
        raise ParameterError("need n_classes >= 2, n_features >= 1, n_samples >= n_classes")
    if class_sep < 0:
        raise ParameterError(f"class_sep must be non-negative, got {class_sep}")
    radius = class_sep / np.sqrt(2.0)
    centres = np.zeros((n_classes, n_features))
    for c in range(n_classes):
        if c < n_features:
            centres[c, c] = radius
        else:
            d = rng.normal(size=n_features)
            centres[c] = radius * d / np.linalg.norm(d)
    labels = np.arange(n_samples) % n_classes
    rng.shuffle(labels)
    x = centres[labels] + rng.normal(size=(n_samples, n_features))
    return Dataset(x, labels, n_classes)


def train_test_split(
    ds: Dataset, test_fraction: float, rng: np.random.Generator
) -> tuple[Dataset, Dataset]:
    if not 0.0 < test_fraction < 1.0:
        raise ParameterError(f"test_fraction must be in (0, 1), got {test_fraction}")
    perm = rng.permutation(len(ds))
    n_test = max(1, int(round(test_fraction * len(ds))))
    return ds.subset(np.sort(perm[n_test:])), ds.subset(np.sort(perm[:n_test]))


def load_csv_dataset(path: str | Path, n_classes: int | None = None) -> Dataset:
    """Read ``feature,...,feature,label`` rows.

    The class count defaults to ``max(label) + 1``.
    """
    path = Path(path)
    rows: list[list[float]] = []
    labels: list[int] = []
    width = None
    with path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if width is None:
                width = len(row)
                if width < 2:
                    raise SchemaError(f"{path}: need at least one feature and a label")
            elif len(row) != width:
                raise SchemaError(
                    f"{path}: line {lineno} has {len(row)} columns, expected {width}"
                )
            try:
                feats = [float(cell) for cell in row[:-1]]
                label = float(row[-1])
            except ValueError as exc:
                raise ParseError(f"{path}: {exc}", line=lineno) from None
            if not label.is_integer() or label < 0:
                raise ParseError(f"{path}: label {row[-1]!r} is not a class index", line=lineno)
            rows.append(feats)
            labels.append(int(label))
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    y = np.asarray(labels, dtype=np.int64)
    k = n_classes if n_classes is not None else int(y.max()) + 1
    return Dataset(np.asarray(rows), y, max(k, 2))


def save_csv_dataset(ds: Dataset, path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        for x, y in zip(ds.features, ds.labels):
            w.writerow([repr(float(v)) for v in x] + [int(y)])


def dump_partition_json(summary: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(summary, indent=2) + "\n")
