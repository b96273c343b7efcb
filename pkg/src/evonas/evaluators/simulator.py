"""Seeded stand-in for a weight-sharing supernet.

Every (slot, op) pair carries a maturity in [0, 1]. Training a subnet
raises the maturity of the pairs it uses and erodes the maturity of the
sibling ops in the same slots, so training one subnet degrades others.
A subnet's accuracy is its latent quality scaled by the mean maturity of
its pairs, plus evaluation noise.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..space import MBCONV, Genome, SearchSpace, model_size_mb


@dataclass(frozen=True)
class SimulatorConfig:
    learning_rate: float = 0.15          # maturity step toward 1 for trained pairs
    interference_rate: float = 0.03      # multiplicative decay of sibling ops
    noise_sigma: float = 0.02
    interaction_density: float = 0.05    # fraction of slot pairs with an interaction table
    interaction_scale: float = 0.1       # relative to the main-effect scale
    base_logit: float = 0.6
    main_effect_scale: float = 0.12
    capacity_effect: float = 0.03        # per-slot bonus for larger ops
    batches_per_epoch: int = 20          # one step per member of a 20-strong population

    def __post_init__(self):
        if not 0.0 <= self.learning_rate <= 1.0:
            raise ValueError("learning_rate must lie in [0, 1]")
        if not 0.0 <= self.interference_rate <= 1.0:
            raise ValueError("interference_rate must lie in [0, 1]")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if not 0.0 <= self.interaction_density <= 1.0:
            raise ValueError("interaction_density must lie in [0, 1]")
        if self.batches_per_epoch < 1:
            raise ValueError("batches_per_epoch must be >= 1")


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


class SimulatorEvaluator:
    read_only_eval = True

    def __init__(self, space: SearchSpace | None = None,
                 config: SimulatorConfig | None = None, seed: int = 0):
        self.space = space or SearchSpace()
        self.config = config or SimulatorConfig()
        self.batches_per_epoch = self.config.batches_per_epoch
        self.reset(seed)

    def reset(self, seed: int) -> None:
        cfg, space = self.config, self.space
        self.seed = int(seed)
        rng = np.random.default_rng([self.seed, 0x51A])
        n, k = space.total_blocks, space.num_ops

        # bigger ops score a little higher on average, so size trades off with accuracy
        capacity = np.array([
            np.log(op.kernel * op.expansion) if op.kind == MBCONV else 0.0
            for op in space.ops])
        if capacity.max() > 0:
            capacity = capacity / capacity.max()
        self.latent = (cfg.base_logit / n
                       + cfg.capacity_effect * capacity[None, :]
                       + rng.normal(0.0, cfg.main_effect_scale, size=(n, k)))

        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        n_inter = int(round(cfg.interaction_density * len(pairs)))
        picked = rng.choice(len(pairs), size=n_inter, replace=False) if n_inter else []
        mag = cfg.interaction_scale * cfg.main_effect_scale
        self.interaction = {
            pairs[p]: rng.uniform(-mag, mag, size=(k, k)) for p in sorted(picked)}

        self.maturity = np.zeros((n, k))
        self.epoch = 0

    def begin_epoch(self, epoch: int) -> None:
        self.epoch = int(epoch)

    def latent_score(self, g: Genome) -> float:
        c = np.asarray(g.choices)
        score = self.latent[np.arange(len(c)), c].sum()
        for (i, j), table in self.interaction.items():
            score += table[c[i], c[j]]
        return float(score)

    def mean_maturity(self, g: Genome) -> float:
        c = np.asarray(g.choices)
        return float(self.maturity[np.arange(len(c)), c].mean())

    def _noise(self, g: Genome) -> float:
        if self.config.noise_sigma == 0:
            return 0.0
        rng = np.random.default_rng([self.seed, self.epoch, int(g.id, 16)])
        return float(rng.normal(0.0, self.config.noise_sigma))

    def evaluate(self, g: Genome) -> float:
        self.space.validate(g)
        acc = _sigmoid(self.latent_score(g)) * self.mean_maturity(g) + self._noise(g)
        return float(np.clip(acc, 0.0, 1.0))

    def train_subnet(self, g: Genome, batch_index: int = 0) -> float:
        self.space.validate(g)
        cfg = self.config
        rows = np.arange(self.space.total_blocks)
        cols = np.asarray(g.choices)
        chosen = self.maturity[rows, cols].copy()
        self.maturity[rows] *= 1.0 - cfg.interference_rate
        self.maturity[rows, cols] = chosen + cfg.learning_rate * (1.0 - chosen)
        np.clip(self.maturity, 0.0, 1.0, out=self.maturity)
        return 1.0 - self.evaluate(g)

    def size_mb(self, g: Genome) -> float:
        return model_size_mb(g, self.space)
