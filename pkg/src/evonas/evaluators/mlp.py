"""A small weight-shared dense supernet trained with hand-written backprop.

Layout: a fixed affine+ReLU stem to `width` features, `slots` searchable
slots, and a fixed affine head. Each slot picks Skip or a residual dense op
``h + W2 relu(W1 h + b1) + b2`` whose hidden width is ``expansion * width``.
Every (slot, op) owns its tensors; a train step only touches the tensors of
the ops the genome selects.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import NonFiniteLoss, ShapeMismatch
from ..space import SKIP, Genome, SearchSpace, mlp_space
from .data import Dataset


@dataclass(frozen=True)
class AdamConfig:
    lr: float = 1e-3
    weight_decay: float = 3e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


@dataclass
class SharedWeights:
    space: SearchSpace
    input_dim: int
    params: dict[str, np.ndarray]
    adam: AdamConfig = field(default_factory=AdamConfig)
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    steps: dict[str, int] = field(default_factory=dict)

    @property
    def width(self) -> int:
        return self.space.stem_channels

    def op_tensors(self, slot: int, op_index: int) -> list[str]:
        if self.space.ops[op_index].kind == SKIP:
            return []
        p = f"slot{slot}.op{op_index}"
        return [f"{p}.W1", f"{p}.b1", f"{p}.W2", f"{p}.b2"]

    def used_tensors(self, g: Genome) -> list[str]:
        names = ["stem.W", "stem.b"]
        for s, c in enumerate(g.choices):
            names += self.op_tensors(s, c)
        return names + ["head.W", "head.b"]

    def copy(self) -> "SharedWeights":
        return SharedWeights(
            self.space, self.input_dim,
            {k: a.copy() for k, a in self.params.items()}, self.adam,
            {k: a.copy() for k, a in self.m.items()},
            {k: a.copy() for k, a in self.v.items()},
            dict(self.steps))


def _glorot(rng, fan_in, fan_out):
    lim = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-lim, lim, size=(fan_in, fan_out))


def init_weights(space: SearchSpace, input_dim: int, rng: np.random.Generator,
                 adam: AdamConfig | None = None) -> SharedWeights:
    w, n_cls = space.stem_channels, space.num_classes
    params = {"stem.W": _glorot(rng, input_dim, w), "stem.b": np.zeros(w)}
    for s in range(space.total_blocks):
        for j, op in enumerate(space.ops):
            if op.kind == SKIP:
                continue
            inner = op.expansion * w
            p = f"slot{s}.op{j}"
            params[f"{p}.W1"] = _glorot(rng, w, inner)
            params[f"{p}.b1"] = np.zeros(inner)
            params[f"{p}.W2"] = _glorot(rng, inner, w)
            params[f"{p}.b2"] = np.zeros(w)
    params["head.W"] = _glorot(rng, w, n_cls)
    params["head.b"] = np.zeros(n_cls)
    return SharedWeights(space, input_dim, params, adam or AdamConfig())


def _check_input(weights: SharedWeights, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[1] != weights.input_dim:
        raise ShapeMismatch(f"expected (batch, {weights.input_dim}) input, got {x.shape}")
    return x


def _forward(weights: SharedWeights, g: Genome, x: np.ndarray):
    P = weights.params
    pre = x @ P["stem.W"] + P["stem.b"]
    h = np.maximum(pre, 0.0)
    cache = {"x": x, "stem_pre": pre, "slots": []}
    for s, c in enumerate(g.choices):
        names = weights.op_tensors(s, c)
        if not names:
            cache["slots"].append(None)
            continue
        W1, b1, W2, b2 = (P[n] for n in names)
        a = h @ W1 + b1
        r = np.maximum(a, 0.0)
        cache["slots"].append((names, h, a, r))
        h = h + r @ W2 + b2
    cache["h"] = h
    logits = h @ P["head.W"] + P["head.b"]
    return logits, cache


def mlp_forward(weights: SharedWeights, g: Genome, x) -> np.ndarray:
    weights.space.validate(g)
    logits, _ = _forward(weights, g, _check_input(weights, x))
    return logits


def _softmax_xent(logits: np.ndarray, y: np.ndarray):
    z = logits - logits.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    n = len(y)
    loss = -logp[np.arange(n), y].mean()
    dlogits = np.exp(logp)
    dlogits[np.arange(n), y] -= 1.0
    return loss, dlogits / n


def loss_and_grads(weights: SharedWeights, g: Genome, x, y) -> tuple[float, dict[str, np.ndarray]]:
    """Mean cross-entropy and its exact gradient for the tensors `g` uses."""
    weights.space.validate(g)
    x = _check_input(weights, x)
    y = np.asarray(y, dtype=int)
    P = weights.params
    logits, cache = _forward(weights, g, x)
    loss, dlogits = _softmax_xent(logits, y)

    grads = {"head.W": cache["h"].T @ dlogits, "head.b": dlogits.sum(axis=0)}
    dh = dlogits @ P["head.W"].T
    for entry in reversed(cache["slots"]):
        if entry is None:
            continue
        names, h_in, a, r = entry
        W1, _, W2, _ = (P[n] for n in names)
        grads[names[2]] = r.T @ dh
        grads[names[3]] = dh.sum(axis=0)
        da = (dh @ W2.T) * (a > 0)
        grads[names[0]] = h_in.T @ da
        grads[names[1]] = da.sum(axis=0)
        dh = dh + da @ W1.T
    dpre = dh * (cache["stem_pre"] > 0)
    grads["stem.W"] = x.T @ dpre
    grads["stem.b"] = dpre.sum(axis=0)
    return float(loss), grads


def _adam_update(weights: SharedWeights, name: str, grad: np.ndarray) -> None:
    cfg = weights.adam
    p = weights.params[name]
    if name not in weights.m:
        weights.m[name] = np.zeros_like(p)
        weights.v[name] = np.zeros_like(p)
        weights.steps[name] = 0
    t = weights.steps[name] = weights.steps[name] + 1
    m = weights.m[name]
    v = weights.v[name]
    m *= cfg.beta1
    m += (1 - cfg.beta1) * grad
    v *= cfg.beta2
    v += (1 - cfg.beta2) * grad * grad
    m_hat = m / (1 - cfg.beta1 ** t)
    v_hat = v / (1 - cfg.beta2 ** t)
    # decoupled weight decay
    p -= cfg.lr * (m_hat / (np.sqrt(v_hat) + cfg.eps) + cfg.weight_decay * p)


def mlp_train_step(weights: SharedWeights, g: Genome, batch) -> float:
    """One Adam step on the tensors of `g` only; returns the pre-update loss."""
    x, y = batch
    if len(y) == 0:
        raise ValueError("empty batch")
    loss, grads = loss_and_grads(weights, g, x, y)
    if not np.isfinite(loss) or not all(np.isfinite(gr).all() for gr in grads.values()):
        raise NonFiniteLoss(f"non-finite loss or gradient (loss={loss})")
    for name, grad in grads.items():
        _adam_update(weights, name, grad)
    return loss


def mlp_predict(weights: SharedWeights, g: Genome, x) -> np.ndarray:
    return mlp_forward(weights, g, x).argmax(axis=1)


def mlp_evaluate(weights: SharedWeights, g: Genome, x, y) -> float:
    y = np.asarray(y)
    if len(y) == 0:
        return 0.0
    return float((mlp_predict(weights, g, x) == y).mean())


def mlp_param_count(space: SearchSpace, g: Genome, input_dim: int) -> int:
    w, n_cls = space.stem_channels, space.num_classes
    total = input_dim * w + w + w * n_cls + n_cls
    for c in g.choices:
        op = space.ops[c]
        if op.kind != SKIP:
            inner = op.expansion * w
            total += 2 * w * inner + inner + w
    return total


@dataclass(frozen=True)
class MLPConfig:
    slots: int = 4
    width: int = 16
    expansions: tuple[int, ...] = (1, 2, 4)
    batch_size: int = 32
    lr: float = 1e-3
    weight_decay: float = 3e-4

    def __post_init__(self):
        object.__setattr__(self, "expansions", tuple(self.expansions))
        if self.slots < 1 or self.width < 1 or self.batch_size < 1:
            raise ValueError("slots, width and batch_size must be >= 1")
        if not self.expansions or min(self.expansions) < 1:
            raise ValueError("expansions must be positive")

    @property
    def adam(self) -> AdamConfig:
        return AdamConfig(lr=self.lr, weight_decay=self.weight_decay)


def batch_schedule(n_rows: int, batch_size: int, seed: int, epoch: int) -> list[np.ndarray]:
    """Seeded per-epoch shuffle of row positions cut into mini-batches."""
    perm = np.random.default_rng([seed, 0xBA7C, epoch]).permutation(n_rows)
    return [perm[i:i + batch_size] for i in range(0, n_rows, batch_size)]


class MLPEvaluator:
    """Evaluator backed by the shared dense supernet."""

    read_only_eval = True

    def __init__(self, dataset: Dataset, config: MLPConfig | None = None, seed: int = 0):
        self.dataset = dataset
        self.config = config or MLPConfig()
        self.space = mlp_space(self.config.slots, self.config.width,
                               self.config.expansions, dataset.num_classes)
        n_train = len(dataset.splits["train"])
        self.batches_per_epoch = -(-n_train // self.config.batch_size)
        self.reset(seed)

    def reset(self, seed: int) -> None:
        self.seed = int(seed)
        rng = np.random.default_rng([self.seed, 0x3117])
        self.weights = init_weights(self.space, self.dataset.dims, rng, self.config.adam)
        self.epoch = 0

    def begin_epoch(self, epoch: int) -> None:
        self.epoch = int(epoch)

    def _batch(self, batch_index: int):
        train = self.dataset.splits["train"]
        epoch, j = divmod(int(batch_index), self.batches_per_epoch)
        rows = train[batch_schedule(len(train), self.config.batch_size, self.seed, epoch)[j]]
        return self.dataset.features[rows], self.dataset.labels[rows]

    def train_subnet(self, g: Genome, batch_index: int) -> float:
        return mlp_train_step(self.weights, g, self._batch(batch_index))

    def evaluate(self, g: Genome) -> float:
        val = self.dataset.splits["val"]
        return mlp_evaluate(self.weights, g, self.dataset.features[val], self.dataset.labels[val])

    def size_mb(self, g: Genome) -> float:
        return mlp_param_count(self.space, g, self.dataset.dims) * 4 / 2 ** 20


def retrain(genome: Genome, dataset: Dataset, epochs: int, seed: int,
            config: MLPConfig | None = None) -> dict:
    """Train a fresh, unshared copy of `genome` on train+val; score on test."""
    config = config or MLPConfig()
    if epochs < 0:
        raise ValueError("epochs must be >= 0")
    space = mlp_space(config.slots, config.width, config.expansions, dataset.num_classes)
    space.validate(genome)
    rng = np.random.default_rng([int(seed), 0x7E7])
    weights = init_weights(space, dataset.dims, rng, config.adam)
    rows = np.concatenate([dataset.splits["train"], dataset.splits["val"]])
    last_loss = None
    for epoch in range(epochs):
        for idx in batch_schedule(len(rows), config.batch_size, int(seed), epoch):
            sel = rows[idx]
            last_loss = mlp_train_step(weights, genome,
                                       (dataset.features[sel], dataset.labels[sel]))
    test = dataset.splits["test"]
    return {
        "genome": list(genome.choices),
        "genome_id": genome.id,
        "epochs": int(epochs),
        "seed": int(seed),
        "final_train_loss": last_loss,
        "test_accuracy": mlp_evaluate(weights, genome, dataset.features[test],
                                      dataset.labels[test]),
    }
