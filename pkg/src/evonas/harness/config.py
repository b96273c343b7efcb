"""Run configuration: a YAML file with strict keys.

Schema (every key optional; defaults shown)::

    evaluator: simulator          # simulator | mlp
    seeds: [0]
    output: runs/default
    engine:
      total_epochs: 100
      warmup_epochs: 10
      population_size: 20
      survivors: 10
      crossover_prob: 0.3
      mutation_prob: 0.2
      objectives: [accuracy, potential, size_mb]
      potential_variant: origin      # origin | intercept
      warmup_pool: 100
      mutation_rate: null         # per block; null means 1/total_blocks
      steps_per_individual: null  # null means batches_per_epoch // population_size
    simulator: {learning_rate, interference_rate, noise_sigma, interaction_density,
                interaction_scale, base_logit, main_effect_scale, capacity_effect,
                batches_per_epoch}
    mlp: {slots, width, expansions, batch_size, lr, weight_decay}
    dataset: {classes, dims, per_class, warp, separation, seed}

The search seed is not part of ``engine``; it comes from ``seeds`` or the
command line.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..engine import EngineConfig
from ..errors import ConfigError
from ..evaluators import (DatasetSpec, MLPConfig, MLPEvaluator, SimulatorConfig,
                          SimulatorEvaluator, make_dataset)
from ..evaluators.mlp import mlp_param_count
from ..space import SearchSpace, mlp_space, model_size_mb

EVALUATORS = ("simulator", "mlp")
TOP_KEYS = {"evaluator", "seeds", "output", "engine", "simulator", "mlp", "dataset"}


@dataclass(frozen=True)
class DataConfig:
    spec: DatasetSpec = field(default_factory=DatasetSpec)
    seed: int = 0


@dataclass(frozen=True)
class RunConfig:
    engine: EngineConfig = field(default_factory=EngineConfig)
    evaluator: str = "simulator"
    simulator: SimulatorConfig = field(default_factory=SimulatorConfig)
    mlp: MLPConfig = field(default_factory=MLPConfig)
    data: DataConfig = field(default_factory=DataConfig)
    output: str | None = None
    seeds: tuple[int, ...] = (0,)

    def for_seed(self, seed: int) -> "RunConfig":
        return dataclasses.replace(self, engine=dataclasses.replace(self.engine, seed=int(seed)))

    def to_dict(self) -> dict:
        engine = dataclasses.asdict(self.engine)
        engine["objectives"] = list(engine["objectives"])
        seed = engine.pop("seed")
        out = {
            "evaluator": self.evaluator,
            "seed": seed,
            "engine": engine,
            "dataset": {**dataclasses.asdict(self.data.spec), "seed": self.data.seed},
        }
        if self.evaluator == "simulator":
            out["simulator"] = dataclasses.asdict(self.simulator)
        else:
            out["mlp"] = {**dataclasses.asdict(self.mlp),
                          "expansions": list(self.mlp.expansions)}
        return out


def _build(cls, section: str, data, extra_forbidden=()):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"[{section}] must be a mapping")
    names = {f.name for f in dataclasses.fields(cls)} - set(extra_forbidden)
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(unknown)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section}]: {exc}") from exc


def parse_config(data) -> RunConfig:
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    unknown = sorted(set(data) - TOP_KEYS)
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {', '.join(unknown)}")
    evaluator = data.get("evaluator", "simulator")
    if evaluator not in EVALUATORS:
        raise ConfigError(f"evaluator must be one of {EVALUATORS}, got {evaluator!r}")
    seeds = data.get("seeds", [0])
    if (not isinstance(seeds, list) or not seeds
            or not all(isinstance(s, int) and not isinstance(s, bool) and s >= 0 for s in seeds)):
        raise ConfigError("seeds must be a non-empty list of non-negative integers")
    if len(set(seeds)) != len(seeds):
        raise ConfigError("seeds must be distinct")
    ds = data.get("dataset") or {}
    if not isinstance(ds, dict):
        raise ConfigError("[dataset] must be a mapping")
    ds = dict(ds)
    ds_seed = ds.pop("seed", 0)
    if not isinstance(ds_seed, int) or ds_seed < 0:
        raise ConfigError("dataset.seed must be a non-negative integer")
    output = data.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output must be a path string")
    return RunConfig(
        engine=_build(EngineConfig, "engine", data.get("engine"), extra_forbidden=("seed",)),
        evaluator=evaluator,
        simulator=_build(SimulatorConfig, "simulator", data.get("simulator")),
        mlp=_build(MLPConfig, "mlp", data.get("mlp")),
        data=DataConfig(_build(DatasetSpec, "dataset", ds), ds_seed),
        output=output,
        seeds=tuple(seeds),
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path} is not valid YAML: {exc}") from exc
    return parse_config(data)


def config_from_header(cfg: dict) -> RunConfig:
    """Rebuild a RunConfig from the ``to_dict`` form stored in run artifacts."""
    data = {k: v for k, v in cfg.items() if k != "seed"}
    run = parse_config(data)
    return run.for_seed(cfg.get("seed", 0))


def build_evaluator(run: RunConfig):
    if run.evaluator == "simulator":
        return SimulatorEvaluator(config=run.simulator, seed=run.engine.seed)
    dataset = make_dataset(run.data.spec, run.data.seed)
    return MLPEvaluator(dataset, run.mlp, seed=run.engine.seed)


def search_space(run: RunConfig) -> SearchSpace:
    if run.evaluator == "simulator":
        return SearchSpace()
    return mlp_space(run.mlp.slots, run.mlp.width, run.mlp.expansions, run.data.spec.classes)


def size_function(run: RunConfig):
    """Model size in MB for a genome, without building an evaluator."""
    space = search_space(run)
    if run.evaluator == "simulator":
        return lambda g: model_size_mb(g, space)
    dims = run.data.spec.dims
    return lambda g: mlp_param_count(space, g, dims) * 4 / 2 ** 20


__all__ = ["RunConfig", "DataConfig", "build_evaluator", "config_from_header",
           "load_config", "parse_config", "search_space", "size_function"]
