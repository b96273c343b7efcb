"""Warm-up plus NSGA-II evolutionary search over a weight-sharing evaluator.

The loop alternates two levels. Inside a generation every population member
gets the same number of single-subnet training steps on the shared state,
then each is evaluated, its history is extended, objective vectors are
built, ``K`` survivors are kept by NSGA-II and ``P - K`` offspring are bred.

Every step is appended to a run log (a list of plain dicts). The log is a
pure function of the config, the evaluator kind/config and the seed.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .evaluators import Evaluator
from .evaluators.mlp import retrain
from .ledger import ORIGIN, INTERCEPT, Ledger, normalize_objectives, objective_vector
from .pareto import Candidate, non_dominated_sort, select
from .space import Genome, SearchSpace, crossover, default_mutation_rate, mutate, random_genome

log = logging.getLogger(__name__)

CROSSOVER = "crossover"
MUTATION = "mutation"
RANDOM = "random"


class EngineError(RuntimeError):
    pass


@dataclass(frozen=True)
class EngineConfig:
    total_epochs: int = 100
    warmup_epochs: int = 10
    population_size: int = 20
    survivors: int = 10
    crossover_prob: float = 0.3
    mutation_prob: float = 0.2
    objectives: tuple[str, ...] = ("accuracy", "potential", "size_mb")
    potential_variant: str = ORIGIN
    warmup_pool: int = 100
    seed: int = 0
    mutation_rate: float | None = None        # per block; None means 1/total_blocks
    steps_per_individual: int | None = None   # None means batches_per_epoch // P

    def __post_init__(self):
        object.__setattr__(self, "objectives", normalize_objectives(self.objectives))
        if not 0 < self.warmup_epochs < self.total_epochs:
            raise ValueError("need 0 < warmup_epochs < total_epochs")
        if not 0 < self.survivors < self.population_size:
            raise ValueError("need 0 < survivors < population_size")
        for p in (self.crossover_prob, self.mutation_prob):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability {p} outside [0, 1]")
        if self.crossover_prob + self.mutation_prob > 1.0:
            raise ValueError("crossover_prob + mutation_prob must be <= 1")
        if self.potential_variant not in (ORIGIN, INTERCEPT):
            raise ValueError(f"unknown potential variant {self.potential_variant!r}")
        if self.warmup_pool < self.population_size:
            raise ValueError("warmup_pool must be >= population_size")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must lie in [0, 1]")
        if self.steps_per_individual is not None and self.steps_per_individual < 1:
            raise ValueError("steps_per_individual must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def generations(self) -> int:
        return self.total_epochs - self.warmup_epochs


@dataclass
class SearchState:
    epoch: int
    population: list[Genome]
    ledger: Ledger
    evaluator: Evaluator
    rng: np.random.Generator
    train_steps: int = 0
    trained_ids: set = field(default_factory=set)
    trained_by_epoch: dict = field(default_factory=dict)
    wall_clock_ms: int = 0
    front: list[Candidate] = field(default_factory=list)
    run_log: list[dict] = field(default_factory=list)

    @property
    def counters(self) -> dict:
        return {"train_steps": self.train_steps,
                "distinct_genomes_trained": len(self.trained_ids),
                "wall_clock_ms": self.wall_clock_ms}

    def snapshot(self) -> dict:
        # wall clock stays out of the log so logs are reproducible
        return {"train_steps": self.train_steps,
                "distinct_genomes_trained": len(self.trained_ids)}


@dataclass
class SearchResult:
    pareto_front: list[Candidate]
    ledger: Ledger
    run_log: list[dict]
    counters: dict
    trained_by_epoch: dict
    population: list[Genome]
    config: EngineConfig


def quarter_of(epoch: int, warmup_epochs: int, total_epochs: int) -> int:
    """Equal-width quarter (0..3) of the post-warm-up epochs."""
    span = total_epochs - warmup_epochs
    return min(3, (epoch - warmup_epochs - 1) * 4 // span)


def encode_crowding(d: float | None):
    if d is None:
        return None
    return "inf" if math.isinf(d) else d


class _Recorder:
    """Buffers one phase's records; the phase is committed only when complete."""

    def __init__(self, state: SearchState):
        self.state = state
        self.rows: list[dict] = []

    def add(self, epoch: int, event: str, g: Genome, **extra) -> None:
        row = {"seq": len(self.state.run_log) + len(self.rows), "epoch": epoch,
               "event": event, "genome_id": g.id, "choices": list(g.choices)}
        row.update(extra)
        row["counters"] = self.state.snapshot()
        self.rows.append(row)

    def commit(self) -> None:
        self.state.run_log.extend(self.rows)
        self.rows = []


def _train(state: SearchState, rec: _Recorder, epoch: int, event: str,
           g: Genome, batch_index: int) -> None:
    loss = state.evaluator.train_subnet(g, batch_index)
    state.train_steps += 1
    state.trained_ids.add(g.id)
    state.trained_by_epoch.setdefault(epoch, set()).add(g.id)
    rec.add(epoch, event, g, batch=batch_index, loss=float(loss))


def warmup(config: EngineConfig, evaluator: Evaluator, rng: np.random.Generator,
           state: SearchState | None = None) -> SearchState:
    """Train on uniformly sampled subnets, then seed the population from a pool."""
    space = evaluator.space
    if state is None:
        state = SearchState(0, [], Ledger(), evaluator, rng)
    if space.num_ops ** space.total_blocks < config.warmup_pool:
        raise ValueError("warmup_pool exceeds the number of distinct genomes")
    B = evaluator.batches_per_epoch
    rec = _Recorder(state)
    for epoch in range(1, config.warmup_epochs + 1):
        evaluator.begin_epoch(epoch)
        for b in range(B):
            _train(state, rec, epoch, "warmup_train", random_genome(space, rng),
                   (epoch - 1) * B + b)

    epoch = config.warmup_epochs
    pool: dict[str, Genome] = {}
    while len(pool) < config.warmup_pool:
        g = random_genome(space, rng)
        pool.setdefault(g.id, g)
    evaluator.begin_epoch(epoch)
    scored = []
    for gid in sorted(pool):
        acc = evaluator.evaluate(pool[gid])
        state.ledger.record_sample(gid, epoch, acc)
        rec.add(epoch, "warmup_eval", pool[gid], accuracy=acc)
        scored.append((acc, gid))
    top = sorted(scored, key=lambda t: (-t[0], t[1]))[: config.population_size]
    chosen = sorted(gid for _, gid in top)
    for gid in chosen:
        rec.add(epoch, "select", pool[gid],
                objectives={"accuracy": state.ledger.history(gid).accuracies[-1]})
    state.population = [pool[gid] for gid in chosen]
    state.epoch = epoch
    rec.commit()
    return state


def _breed(parents: Sequence[Genome], count: int, config: EngineConfig,
           rng: np.random.Generator, space: SearchSpace) -> list[tuple[Genome, str, list[str]]]:
    if not parents:
        raise ValueError("need at least one parent")
    rate = config.mutation_rate if config.mutation_rate is not None else default_mutation_rate(space)
    out = []
    for _ in range(count):
        u = rng.random()
        if u < config.crossover_prob:
            if len(parents) == 1:
                a = b = parents[0]
            else:
                i, j = rng.choice(len(parents), size=2, replace=False)
                a, b = parents[i], parents[j]
            out.append((crossover(a, b, rng), CROSSOVER, [a.id, b.id]))
        elif u < config.crossover_prob + config.mutation_prob:
            p = parents[rng.integers(len(parents))]
            out.append((mutate(p, rate, rng, space.num_ops), MUTATION, [p.id]))
        else:
            out.append((random_genome(space, rng), RANDOM, []))
    return out


def generate_offspring(pareto: Sequence[Genome], count: int, config: EngineConfig,
                       rng: np.random.Generator, space: SearchSpace) -> list[Genome]:
    """Crossover / mutation / fresh sampling with the configured probabilities."""
    return [g for g, _, _ in _breed(pareto, count, config, rng, space)]


def _steps_per_individual(config: EngineConfig, evaluator: Evaluator) -> int:
    if config.steps_per_individual is not None:
        return config.steps_per_individual
    return max(1, evaluator.batches_per_epoch // config.population_size)


def run_generation(state: SearchState, config: EngineConfig) -> SearchState:
    evaluator = state.evaluator
    space = evaluator.space
    P, K = config.population_size, config.survivors
    if len(state.population) != P:
        raise EngineError(f"population has {len(state.population)} members, expected {P}")
    epoch = state.epoch + 1
    evaluator.begin_epoch(epoch)
    rec = _Recorder(state)
    B = evaluator.batches_per_epoch

    # weights training: round-robin, so every member gets the same step count
    steps = _steps_per_individual(config, evaluator) * P
    for j in range(steps):
        _train(state, rec, epoch, "train", state.population[j % P], (epoch - 1) * B + j % B)

    counts: dict[str, int] = {}
    by_id: dict[str, Genome] = {}
    for g in state.population:
        counts[g.id] = counts.get(g.id, 0) + 1
        by_id[g.id] = g
    vectors = {}
    for gid in sorted(by_id):
        acc = evaluator.evaluate(by_id[gid])
        state.ledger.record_sample(gid, epoch, acc)
        vec = objective_vector(gid, state.ledger, evaluator.size_mb(by_id[gid]),
                               config.objectives, config.potential_variant)
        vectors[gid] = vec
        rec.add(epoch, "eval", by_id[gid], accuracy=acc, count=counts[gid],
                objectives=vec.as_dict())

    cands = [Candidate(g.id, g, vectors[g.id])
             for g in sorted(state.population, key=lambda g: g.id)]
    survivors = select(cands, K)
    for c in survivors:
        rec.add(epoch, "select", c.genome, objectives=c.objectives.as_dict(),
                front_rank=c.front_rank, crowding=encode_crowding(c.crowding))

    uniq = [Candidate(gid, by_id[gid], vectors[gid]) for gid in sorted(by_id)]
    state.front = [uniq[i] for i in non_dominated_sort(uniq)[0]]

    parents = [c.genome for c in survivors]
    children = _breed(parents, P - K, config, state.rng, space)
    for g, branch, src in children:
        rec.add(epoch, "offspring", g, branch=branch, parents=src)

    population = parents + [g for g, _, _ in children]
    if len(population) != P:
        raise EngineError(f"generation {epoch} produced {len(population)} members")
    state.population = population
    state.epoch = epoch
    rec.commit()
    return state


def run_search(config: EngineConfig, evaluator: Evaluator) -> SearchResult:
    t0 = time.perf_counter()
    evaluator.reset(config.seed)
    rng = np.random.default_rng(config.seed)
    state = warmup(config, evaluator, rng)
    log.info("warm-up done: %d train steps, population of %d",
             state.train_steps, len(state.population))
    for _ in range(config.generations):
        run_generation(state, config)
        state.wall_clock_ms = int((time.perf_counter() - t0) * 1000)
        log.debug("epoch %d: front of %d", state.epoch, len(state.front))
    return SearchResult(
        pareto_front=state.front,
        ledger=state.ledger,
        run_log=state.run_log,
        counters=state.counters,
        trained_by_epoch=state.trained_by_epoch,
        population=state.population,
        config=config,
    )


__all__ = [
    "EngineConfig", "EngineError", "SearchResult", "SearchState", "generate_offspring",
    "quarter_of", "retrain", "run_generation", "run_search", "warmup",
]
