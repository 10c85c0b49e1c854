"""One-hidden-layer softmax classifier trained with Adam, written out by hand.

Network: ``x -> relu(W1 x + b1) -> W2 h + b2 -> softmax -> (F^0, F^1)``.
All parameters live in one flat vector so that the optimizer update is a
handful of vectorized operations per step.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import DataError, DivergenceError, ShapeError

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


class FfnnParams:
    """Weights ``w1 (H, K)``, ``b1 (H,)``, ``w2 (2, H)``, ``b2 (2,)`` as views of ``flat``."""

    def __init__(self, input_dim: int, hidden: int, flat: np.ndarray | None = None):
        self.input_dim, self.hidden = int(input_dim), int(hidden)
        sizes = [hidden * input_dim, hidden, 2 * hidden, 2]
        self._bounds = np.cumsum([0] + sizes)
        n = int(self._bounds[-1])
        if flat is None:
            flat = np.zeros(n)
        elif flat.shape != (n,):
            raise ShapeError(f"flat parameter vector must have length {n}, got {flat.shape}")
        self.flat = flat

    def _view(self, k: int, shape) -> np.ndarray:
        return self.flat[self._bounds[k] : self._bounds[k + 1]].reshape(shape)

    @property
    def w1(self) -> np.ndarray:
        return self._view(0, (self.hidden, self.input_dim))

    @property
    def b1(self) -> np.ndarray:
        return self._view(1, (self.hidden,))

    @property
    def w2(self) -> np.ndarray:
        return self._view(2, (2, self.hidden))

    @property
    def b2(self) -> np.ndarray:
        return self._view(3, (2,))

    def copy(self) -> "FfnnParams":
        return FfnnParams(self.input_dim, self.hidden, self.flat.copy())

    def like(self, flat: np.ndarray) -> "FfnnParams":
        return FfnnParams(self.input_dim, self.hidden, flat)

    def to_json(self) -> str:
        return json.dumps(
            {
                "layers": [[self.hidden, self.input_dim], [2, self.hidden]],
                "w1": self.w1.ravel().tolist(),
                "b1": self.b1.tolist(),
                "w2": self.w2.ravel().tolist(),
                "b2": self.b2.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "FfnnParams":
        doc = json.loads(text)
        (h, k), _ = doc["layers"]
        flat = np.concatenate([np.asarray(doc[n], dtype=float) for n in ("w1", "b1", "w2", "b2")])
        return cls(k, h, flat)


@dataclass(frozen=True)
class TrainConfig:
    hidden_size: int
    learning_rate: float
    weight_decay: float
    batch_size: int
    epochs: int = 100
    decay: str = "l2"  # "l2" (decoupled quadratic) or "l1"
    input_size: int | None = None
    data_size: int | None = None

    def __post_init__(self) -> None:
        if self.hidden_size < 1 or self.batch_size < 1 or self.epochs < 1:
            raise ValueError(f"hidden_size, batch_size and epochs must be positive: {self}")
        if self.learning_rate <= 0 or self.weight_decay < 0:
            raise ValueError(f"learning_rate must be > 0 and weight_decay >= 0: {self}")
        if self.decay not in ("l2", "l1"):
            raise ValueError(f"decay must be 'l2' or 'l1', got {self.decay!r}")

    def with_(self, **changes) -> "TrainConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)


# Network configurations used for each experiment family.
PRESETS: dict[str, TrainConfig] = {
    "table1_2x2": TrainConfig(32, 1e-3, 1e-4, 50, input_size=16, data_size=1400),
    "table1_3x3": TrainConfig(162, 1e-3, 1e-5, 50, input_size=81, data_size=1400),
    "table1_4x4": TrainConfig(512, 1e-5, 1e-5, 50, input_size=256, data_size=1400),
    "table2": TrainConfig(64, 2e-3, 2e-5, 50, input_size=16, data_size=1000),
    "table3_2x2": TrainConfig(32, 1e-3, 1e-3, 100, input_size=16, data_size=1400),
    "table3_3x3": TrainConfig(162, 1e-2, 1e-4, 100, input_size=81, data_size=1400),
    "table4": TrainConfig(16, 2e-4, 2e-3, 50, input_size=16, data_size=500),
}


def preset(name: str) -> TrainConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def init(input_dim: int, hidden: int, rng: np.random.Generator) -> FfnnParams:
    """Gaussian weights with std ``1/sqrt(fan_in)``, zero biases."""
    if input_dim < 1 or hidden < 1:
        raise ValueError("layer sizes must be >= 1")
    p = FfnnParams(input_dim, hidden)
    p.w1[...] = rng.standard_normal((hidden, input_dim)) / np.sqrt(input_dim)
    p.w2[...] = rng.standard_normal((2, hidden)) / np.sqrt(hidden)
    return p


def _as_batch(params: FfnnParams, x) -> np.ndarray:
    x = np.asarray(getattr(x, "probs", x), dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.shape[1] != params.input_dim:
        raise ShapeError(f"input has {x.shape[1]} features, network expects {params.input_dim}")
    return x


def logits(params: FfnnParams, x) -> np.ndarray:
    x = _as_batch(params, x)
    h = np.maximum(x @ params.w1.T + params.b1, 0.0)
    return h @ params.w2.T + params.b2


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def forward(params: FfnnParams, x) -> np.ndarray:
    """Class probabilities ``(F^0, F^1)``; shape ``(2,)`` for one input, ``(B, 2)`` for a batch."""
    single = np.asarray(getattr(x, "probs", x)).ndim == 1
    out = softmax(logits(params, x))
    return out[0] if single else out


def _targets(y: np.ndarray, crossed: bool) -> np.ndarray:
    y = np.asarray(y, dtype=np.int64)
    return 1 - y if crossed else y


def loss_and_grad(params: FfnnParams, x: np.ndarray, y: np.ndarray, crossed: bool = False):
    """Summed negative log-likelihood and its gradient as a flat vector.

    ``crossed=True`` pairs label-``r`` data with output ``F^{1-r}``.
    """
    x = _as_batch(params, x)
    t = _targets(y, crossed)
    pre = x @ params.w1.T + params.b1
    h = np.maximum(pre, 0.0)
    z = h @ params.w2.T + params.b2
    z = z - z.max(axis=1, keepdims=True)
    logsum = np.log(np.exp(z).sum(axis=1))
    rows = np.arange(len(t))
    loss = float(np.sum(logsum - z[rows, t]))

    dz = np.exp(z - logsum[:, None])
    dz[rows, t] -= 1.0
    grad = params.like(np.empty_like(params.flat))
    grad.w2[...] = dz.T @ h
    grad.b2[...] = dz.sum(axis=0)
    dh = (dz @ params.w2) * (pre > 0)
    grad.w1[...] = dh.T @ x
    grad.b1[...] = dh.sum(axis=0)
    return loss, grad.flat


def loss(params: FfnnParams, x, y, crossed: bool = False) -> float:
    return loss_and_grad(params, x, y, crossed)[0]


def predict(params: FfnnParams, x, crossed: bool = False) -> np.ndarray:
    """Hard decision: label 0 iff ``F^0 >= 1/2`` (label 1 under crossed wiring)."""
    f0 = softmax(logits(params, x))[:, 0]
    dec = np.where(f0 >= 0.5, 0, 1)
    return 1 - dec if crossed else dec


def accuracy(params: FfnnParams, x, y, crossed: bool = False) -> float:
    y = np.asarray(y)
    if y.size == 0:
        raise DataError("accuracy needs a nonempty test set")
    return float(np.mean(predict(params, x, crossed) == y))


class Adam:
    """Adam with decoupled weight decay on a flat parameter vector."""

    def __init__(self, size: int, lr: float, weight_decay: float = 0.0, decay: str = "l2"):
        self.lr, self.weight_decay, self.decay = lr, weight_decay, decay
        self.m = np.zeros(size)
        self.v = np.zeros(size)
        self.t = 0

    def step(self, theta: np.ndarray, grad: np.ndarray) -> None:
        self.t += 1
        self.m *= ADAM_BETA1
        self.m += (1 - ADAM_BETA1) * grad
        self.v *= ADAM_BETA2
        self.v += (1 - ADAM_BETA2) * grad * grad
        m_hat = self.m / (1 - ADAM_BETA1**self.t)
        v_hat = self.v / (1 - ADAM_BETA2**self.t)
        if self.weight_decay:
            shrink = theta if self.decay == "l2" else np.sign(theta)
            theta -= self.lr * self.weight_decay * shrink
        theta -= self.lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)


@dataclass
class TrainResult:
    params: FfnnParams
    best_accuracy: float
    best_epoch: int
    accuracy_trace: list[float] = field(default_factory=list)
    loss_trace: list[float] = field(default_factory=list)


def train(
    params: FfnnParams,
    x_train: np.ndarray,
    y_train: np.ndarray,
    cfg: TrainConfig,
    x_test: np.ndarray,
    y_test: np.ndarray,
    rng: np.random.Generator,
    crossed: bool = False,
) -> TrainResult:
    """Mini-batch Adam; returns the parameters from the epoch with best test accuracy.

    ``params`` is not modified.
    """
    x_train = np.asarray(x_train, dtype=float)
    y_train = np.asarray(y_train)
    if len(y_train) == 0:
        raise DataError("training set is empty")
    if len(y_test) == 0:
        raise DataError("test set is empty")
    theta = params.copy()
    opt = Adam(theta.flat.size, cfg.learning_rate, cfg.weight_decay, cfg.decay)
    n = len(y_train)
    best = (-1.0, 0, theta.copy())
    acc_trace, loss_trace = [], []
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            val, g = loss_and_grad(theta, x_train[idx], y_train[idx], crossed)
            if not np.isfinite(val):
                raise DivergenceError(f"non-finite loss at epoch {epoch}; config {cfg.to_dict()}")
            total += val
            opt.step(theta.flat, g)
        acc = accuracy(theta, x_test, y_test, crossed)
        acc_trace.append(acc)
        loss_trace.append(total / n)
        if acc > best[0]:
            best = (acc, epoch, theta.copy())
    return TrainResult(best[2], best[0], best[1], acc_trace, loss_trace)
