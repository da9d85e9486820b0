"""One-hidden-layer binary classifier: M inputs, N ReLU units, one sigmoid output.

Trained with plain mini-batch SGD on binary cross-entropy.  Dropout (when
enabled) is inverted dropout on the hidden layer, so inference uses the
unmodified network.  Everything is float64 and fully determined by the
config seeds.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .search.evaluator import Evaluator
from .tabular import SplitDataset

THRESHOLD = 0.5


class ConfigError(ValueError):
    pass


class ShapeError(ValueError):
    pass


class NumericDivergenceError(ArithmeticError):
    def __init__(self, epoch: int, batch: int, what: str = "loss"):
        super().__init__(f"non-finite {what} at epoch {epoch}, batch {batch}")
        self.epoch = epoch
        self.batch = batch


@dataclass(frozen=True)
class MlpConfig:
    input_dim: int
    hidden_units: int = 1
    dropout_rate: float = 0.2
    epochs: int = 15
    learning_rate: float = 0.05
    batch_size: int = 32
    weight_seed: int = 0
    shuffle_seed: int = 0

    def __post_init__(self):
        if self.input_dim < 1:
            raise ConfigError(f"input_dim must be >= 1, got {self.input_dim}")
        if self.hidden_units < 1:
            raise ConfigError(f"hidden_units must be >= 1, got {self.hidden_units}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ConfigError(f"dropout_rate must lie in [0, 1), got {self.dropout_rate}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")

    @classmethod
    def for_dataset(cls, ds: SplitDataset, **kwargs) -> "MlpConfig":
        return cls(input_dim=ds.M, **kwargs)


@dataclass
class MlpParams:
    W1: np.ndarray  # (M, N)
    b1: np.ndarray  # (N,)
    W2: np.ndarray  # (N,)
    b2: float

    def copy(self) -> "MlpParams":
        return MlpParams(self.W1.copy(), self.b1.copy(), self.W2.copy(), float(self.b2))

    def arrays(self) -> dict[str, np.ndarray]:
        return {"W1": self.W1, "b1": self.b1, "W2": self.W2, "b2": np.atleast_1d(self.b2)}

    def all_finite(self) -> bool:
        return bool(np.isfinite(self.W1).all() and np.isfinite(self.b1).all()
                    and np.isfinite(self.W2).all() and np.isfinite(self.b2))


@dataclass(frozen=True)
class TrainedModelReport:
    config: MlpConfig
    train_accuracy: float
    test_accuracy: float
    final_loss: float
    initial_loss: float
    wall_time: float = field(default=0.0, compare=False)


def init_params(config: MlpConfig) -> MlpParams:
    """Glorot-uniform weights, zero biases, drawn from ``weight_seed``."""
    rng = np.random.default_rng(config.weight_seed)
    M, N = config.input_dim, config.hidden_units
    lim1 = np.sqrt(6.0 / (M + N))
    lim2 = np.sqrt(6.0 / (N + 1))
    W1 = rng.uniform(-lim1, lim1, size=(M, N))
    W2 = rng.uniform(-lim2, lim2, size=N)
    return MlpParams(W1, np.zeros(N), W2, 0.0)


def sigmoid(z):
    # tanh form never overflows
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(z, dtype=float)))


def forward(params: MlpParams, x, dropout_mask=None, dropout_rate: float = 0.0):
    """Return ``(probability, hidden)`` for one sample ``(M,)`` or a batch ``(B, M)``."""
    x = np.asarray(x, dtype=float)
    M, N = params.W1.shape
    if x.shape[-1] != M or x.ndim not in (1, 2):
        raise ShapeError(f"expected input of width {M}, got shape {x.shape}")
    hidden = np.maximum(x @ params.W1 + params.b1, 0.0)
    if dropout_mask is not None:
        mask = np.asarray(dropout_mask, dtype=float)
        if mask.shape[-1] != N:
            raise ShapeError(f"dropout mask must have width {N}, got shape {mask.shape}")
        hidden = hidden * mask / (1.0 - dropout_rate)
    return sigmoid(hidden @ params.W2 + params.b2), hidden


def loss_and_grads(params: MlpParams, X, y, dropout_mask=None, dropout_rate: float = 0.0):
    """Mean binary cross-entropy over the batch and its gradient w.r.t. every parameter."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    B = X.shape[0]
    z1 = X @ params.W1 + params.b1
    h = np.maximum(z1, 0.0)
    if dropout_mask is not None:
        scale = dropout_mask / (1.0 - dropout_rate)
        h = h * scale
    z2 = h @ params.W2 + params.b2
    # log(1 + e^z) - y z  ==  -[y log p + (1-y) log(1-p)]
    loss = float(np.mean(np.logaddexp(0.0, z2) - y * z2))

    dz2 = (sigmoid(z2) - y) / B
    dW2 = h.T @ dz2
    db2 = float(dz2.sum())
    dh = np.outer(dz2, params.W2)
    if dropout_mask is not None:
        dh = dh * scale
    dz1 = dh * (z1 > 0)
    dW1 = X.T @ dz1
    db1 = dz1.sum(axis=0)
    return loss, MlpParams(dW1, db1, dW2, db2)


def bce_loss(params: MlpParams, X, y) -> float:
    z2 = np.maximum(np.asarray(X) @ params.W1 + params.b1, 0.0) @ params.W2 + params.b2
    return float(np.mean(np.logaddexp(0.0, z2) - np.asarray(y) * z2))


def accuracy(params: MlpParams, X, y) -> float:
    if len(y) == 0:
        return 0.0
    prob, _ = forward(params, X)
    return float(np.mean((prob >= THRESHOLD) == (np.asarray(y) == 1.0)))


def train(ds: SplitDataset, config: MlpConfig) -> tuple[MlpParams, TrainedModelReport]:
    X, y = ds.train.features, ds.train.labels
    n_train = len(y)
    if n_train == 0:
        raise ConfigError("training partition is empty")
    if config.input_dim != ds.M:
        raise ConfigError(f"config input_dim {config.input_dim} != dataset M {ds.M}")
    if config.batch_size > n_train:
        raise ConfigError(f"batch_size {config.batch_size} exceeds {n_train} training rows")

    start = time.perf_counter()
    params = init_params(config)
    initial_loss = bce_loss(params, X, y)
    rng = np.random.default_rng(config.shuffle_seed)
    rate, lr, N = config.dropout_rate, config.learning_rate, config.hidden_units

    for epoch in range(config.epochs):
        order = rng.permutation(n_train)
        for b, lo in enumerate(range(0, n_train, config.batch_size)):
            idx = order[lo:lo + config.batch_size]
            mask = None
            if rate > 0.0:
                mask = (rng.random((len(idx), N)) >= rate).astype(float)
            loss, g = loss_and_grads(params, X[idx], y[idx], mask, rate)
            if not np.isfinite(loss):
                raise NumericDivergenceError(epoch, b)
            params.W1 -= lr * g.W1
            params.b1 -= lr * g.b1
            params.W2 -= lr * g.W2
            params.b2 -= lr * g.b2
            if not params.all_finite():
                raise NumericDivergenceError(epoch, b, "parameter")

    report = TrainedModelReport(
        config=config,
        train_accuracy=accuracy(params, X, y),
        test_accuracy=accuracy(params, ds.test.features, ds.test.labels),
        final_loss=bce_loss(params, X, y),
        initial_loss=initial_loss,
        wall_time=time.perf_counter() - start,
    )
    return params, report


def train_report(ds: SplitDataset, hidden_units: int, base_config: MlpConfig) -> TrainedModelReport:
    if hidden_units < 1:
        raise ConfigError(f"hidden_units must be >= 1, got {hidden_units}")
    return train(ds, replace(base_config, hidden_units=int(hidden_units)))[1]


def pipeline(ds: SplitDataset, hidden_units: int, base_config: MlpConfig) -> float:
    """Train a fresh model of the given width and return its test accuracy."""
    return train_report(ds, hidden_units, base_config).test_accuracy


class PipelineEvaluator(Evaluator):
    """Evaluator whose value at a width is the trained model's test accuracy.

    The full :class:`TrainedModelReport` for each width lands in ``records``.
    """

    def __init__(self, ds: SplitDataset, base_config: MlpConfig, name: str = "pipeline"):
        super().__init__(name=name)
        self.ds = ds
        self.base_config = base_config

    def compute(self, size: int) -> float:
        report = train_report(self.ds, size, self.base_config)
        self.records[size] = report
        return report.test_accuracy


def gradient_check(config: MlpConfig, probe_count: int, seed: int = 0, n_samples: int = 16,
                   step: float = 1e-5, grad_fn=None) -> float:
    """Worst relative error between analytic gradients and central differences.

    Probes random coordinates of a randomly initialised network on random
    data.  A fixed dropout mask is used when ``config.dropout_rate > 0``.
    ``grad_fn(params, X, y, mask, rate) -> (loss, MlpParams)`` replaces the
    analytic backward pass (used to check the checker).
    """
    if probe_count < 1:
        raise ValueError("probe_count must be >= 1")
    grad_fn = grad_fn or loss_and_grads
    rng = np.random.default_rng(seed)
    M, N = config.input_dim, config.hidden_units
    params = init_params(config)
    params.b1 = rng.normal(0.0, 0.1, size=N)
    params.b2 = float(rng.normal(0.0, 0.1))
    X = rng.normal(size=(n_samples, M))
    y = (rng.random(n_samples) < 0.5).astype(float)
    rate = config.dropout_rate
    mask = (rng.random((n_samples, N)) >= rate).astype(float) if rate > 0 else None

    def loss_at(p):
        return loss_and_grads(p, X, y, mask, rate)[0]

    _, grads = grad_fn(params, X, y, mask, rate)
    names = ["W1", "b1", "W2", "b2"]
    sizes = np.array([params.arrays()[k].size for k in names], dtype=float)

    worst = 0.0
    for _ in range(probe_count):
        name = names[rng.choice(4, p=sizes / sizes.sum())]
        flat_index = int(rng.integers(params.arrays()[name].size))
        analytic = float(np.ravel(grads.arrays()[name])[flat_index])

        def shifted(delta):
            p = params.copy()
            if name == "b2":
                p.b2 += delta
            else:
                arr = getattr(p, name)
                arr.reshape(-1)[flat_index] += delta
            return loss_at(p)

        numeric = (shifted(step) - shifted(-step)) / (2 * step)
        denom = max(abs(analytic), abs(numeric))
        err = abs(analytic - numeric) if denom < 1e-8 else abs(analytic - numeric) / denom
        worst = max(worst, err)
    return worst
