"""Evaluator backends.

An evaluator owns the shared state every subnet couples through. The engine
drives it with ``begin_epoch``, ``train_subnet`` (one sampled subnet per
training batch) and ``evaluate`` (validation accuracy in [0, 1]).
"""
from typing import Protocol

from ..space import Genome, SearchSpace
from .data import Dataset, DatasetSpec, load_dataset, make_dataset, save_dataset
from .mlp import MLPConfig, MLPEvaluator, retrain
from .simulator import SimulatorConfig, SimulatorEvaluator


class Evaluator(Protocol):
    space: SearchSpace
    batches_per_epoch: int
    read_only_eval: bool

    def reset(self, seed: int) -> None: ...

    def begin_epoch(self, epoch: int) -> None: ...

    def train_subnet(self, g: Genome, batch_index: int) -> float: ...

    def evaluate(self, g: Genome) -> float: ...

    def size_mb(self, g: Genome) -> float: ...


__all__ = [
    "Dataset", "DatasetSpec", "Evaluator", "MLPConfig", "MLPEvaluator",
    "SimulatorConfig", "SimulatorEvaluator", "load_dataset", "make_dataset",
    "retrain", "save_dataset",
]
