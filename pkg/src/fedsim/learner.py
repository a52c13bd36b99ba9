"""Softmax classifiers with hand-written gradients and local SGD.

Parameters live in one flat vector. Layout, layer by layer: the weight matrix
(``fan_in x fan_out``, row-major) followed by the bias vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import DimensionError, ParameterError
from .params import as_vector

ARCHITECTURES = ("logreg", "mlp")


@dataclass(frozen=True)
class ModelSpec:
    arch: str
    n_features: int
    n_classes: int
    hidden_units: int = 0

    def __post_init__(self):
        if self.arch not in ARCHITECTURES:
            raise ParameterError(f"unknown architecture {self.arch!r}")
        if self.n_features < 1 or self.n_classes < 2:
            raise ParameterError("need n_features >= 1 and n_classes >= 2")
        if self.arch == "mlp" and self.hidden_units < 1:
            raise ParameterError("mlp needs hidden_units >= 1")

    @property
    def layers(self) -> list[tuple[int, int]]:
        if self.arch == "logreg":
            return [(self.n_features, self.n_classes)]
        return [(self.n_features, self.hidden_units), (self.hidden_units, self.n_classes)]

    @property
    def n_params(self) -> int:
        return sum(i * o + o for i, o in self.layers)

    def unpack(self, w: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
        if w.size != self.n_params:
            raise DimensionError(f"expected {self.n_params} parameters, got {w.size}")
        out, pos = [], 0
        for i, o in self.layers:
            W = w[pos : pos + i * o].reshape(i, o)
            pos += i * o
            b = w[pos : pos + o]
            pos += o
            out.append((W, b))
        return out


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 1
    batch_size: int = 64
    lr: float = 0.01

    def __post_init__(self):
        if self.epochs < 0:
            raise ParameterError(f"epochs must be >= 0, got {self.epochs}")
        if self.batch_size < 1:
            raise ParameterError(f"batch_size must be >= 1, got {self.batch_size}")
        if not self.lr > 0:
            raise ParameterError(f"lr must be positive, got {self.lr}")


def init_params(spec: ModelSpec, rng: np.random.Generator) -> np.ndarray:
    """Zeros for logreg; He-normal weights and zero biases for the MLP."""
    if spec.arch == "logreg":
        return np.zeros(spec.n_params)
    chunks = []
    for i, o in spec.layers:
        chunks.append(rng.normal(0.0, np.sqrt(2.0 / i), size=i * o))
        chunks.append(np.zeros(o))
    return np.concatenate(chunks)


def _check_batch(spec: ModelSpec, x: np.ndarray) -> None:
    if x.ndim != 2 or x.shape[0] == 0:
        raise DimensionError("batch must be a non-empty 2-D array")
    if x.shape[1] != spec.n_features:
        raise DimensionError(f"batch has {x.shape[1]} features, model expects {spec.n_features}")


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _forward(w, spec, x):
    layers = spec.unpack(as_vector(w))
    if spec.arch == "logreg":
        (W, b), = layers
        return x @ W + b, None
    (W1, b1), (W2, b2) = layers
    pre = x @ W1 + b1
    h = np.maximum(pre, 0.0)
    return h @ W2 + b2, (pre, h)


def forward_loss(w, spec: ModelSpec, x: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean softmax cross-entropy over the batch and the class probabilities."""
    _check_batch(spec, x)
    logits, _ = _forward(w, spec, x)
    z = logits - logits.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    loss = -logp[np.arange(y.size), y].mean()
    return float(loss), np.exp(logp)


def backward(w, spec: ModelSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Gradient of the batch-mean cross-entropy, flattened like the parameters."""
    _check_batch(spec, x)
    logits, cache = _forward(w, spec, x)
    n = y.size
    g = _softmax(logits)
    g[np.arange(n), y] -= 1.0
    g /= n
    if spec.arch == "logreg":
        return np.concatenate([(x.T @ g).ravel(), g.sum(axis=0)])
    pre, h = cache
    (_, _), (W2, _) = spec.unpack(as_vector(w))
    dW2 = h.T @ g
    db2 = g.sum(axis=0)
    dh = g @ W2.T
    dh[pre <= 0.0] = 0.0
    dW1 = x.T @ dh
    db1 = dh.sum(axis=0)
    return np.concatenate([dW1.ravel(), db1, dW2.ravel(), db2])


def local_train(
    w_global, spec: ModelSpec, ds: Dataset, cfg: TrainConfig, rng: np.random.Generator
) -> np.ndarray:
    """Run ``cfg.epochs`` of mini-batch SGD and return ``w_global - w_final``."""
    if len(ds) == 0:
        raise ParameterError("cannot train on an empty dataset")
    w0 = as_vector(w_global)
    w = w0.copy()
    for _ in range(cfg.epochs):
        order = rng.permutation(len(ds))
        for start in range(0, len(ds), cfg.batch_size):
            b = order[start : start + cfg.batch_size]
            w -= cfg.lr * backward(w, spec, ds.features[b], ds.labels[b])
    return w0 - w


def evaluate(w, spec: ModelSpec, ds: Dataset) -> tuple[float, float]:
    """Accuracy (argmax, lowest class on ties) and mean loss."""
    if len(ds) == 0:
        raise ParameterError("cannot evaluate on an empty dataset")
    loss, _ = forward_loss(w, spec, ds.features, ds.labels)
    logits, _ = _forward(w, spec, ds.features)
    acc = float(np.mean(np.argmax(logits, axis=1) == ds.labels))
    return acc, loss
