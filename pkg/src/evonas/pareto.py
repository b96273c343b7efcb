"""NSGA-II survivor selection: dominance, non-dominated sorting, crowding."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import BadK, ShapeMismatch
from .ledger import MAXIMIZE, ObjectiveVector
from .space import Genome


@dataclass
class Candidate:
    id: str
    genome: Genome | None
    objectives: ObjectiveVector
    front_rank: int | None = None
    crowding: float | None = None


def _check_same(a: ObjectiveVector, b: ObjectiveVector):
    if a.names != b.names or a.directions != b.directions:
        raise ShapeMismatch(f"objective sets differ: {a.names}/{a.directions} "
                            f"vs {b.names}/{b.directions}")


def dominates(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    _check_same(a, b)
    strictly = False
    for x, y, d in zip(a.values, b.values, a.directions):
        if d == MAXIMIZE:
            x, y = -x, -y
        if x > y:
            return False
        if x < y:
            strictly = True
    return strictly


def _cost_matrix(pop: Sequence[Candidate]) -> np.ndarray:
    """Objective values as an (n, d) array where lower is better."""
    first = pop[0].objectives
    for c in pop[1:]:
        _check_same(first, c.objectives)
    sign = np.array([-1.0 if d == MAXIMIZE else 1.0 for d in first.directions])
    return np.array([c.objectives.values for c in pop], dtype=float) * sign


def non_dominated_sort(pop: Sequence[Candidate]) -> list[list[int]]:
    """Partition `pop` into fronts of indices; sets `front_rank` on each candidate."""
    if not pop:
        raise ValueError("population is empty")
    cost = _cost_matrix(pop)
    # dom[i, j]: i dominates j
    le = (cost[:, None, :] <= cost[None, :, :]).all(axis=2)
    lt = (cost[:, None, :] < cost[None, :, :]).any(axis=2)
    dom = le & lt
    n_dominators = dom.sum(axis=0)
    fronts = []
    current = np.flatnonzero(n_dominators == 0)
    while current.size:
        fronts.append([int(i) for i in current])
        n_dominators = n_dominators - dom[current].sum(axis=0)
        n_dominators[current] = -1
        current = np.flatnonzero(n_dominators == 0)
    for rank, front in enumerate(fronts):
        for i in front:
            pop[i].front_rank = rank
    return fronts


def crowding_distance(front: Sequence[Candidate]) -> list[float]:
    n = len(front)
    if n <= 2:
        return [float("inf")] * n
    values = np.array([c.objectives.values for c in front], dtype=float)
    dist = np.zeros(n)
    for j in range(values.shape[1]):
        col = values[:, j]
        order = np.lexsort((np.arange(n), col))
        dist[order[0]] = dist[order[-1]] = np.inf
        span = col[order[-1]] - col[order[0]]
        if span == 0:
            continue
        gaps = (col[order[2:]] - col[order[:-2]]) / span
        dist[order[1:-1]] += gaps
    return [float(d) for d in dist]


def select(pop: Sequence[Candidate], k: int) -> list[Candidate]:
    """Keep `k` survivors front by front, cutting the last front by crowding.

    Repeated genome ids are collapsed to their first occurrence before
    sorting; the extra copies are only used when the distinct candidates
    cannot fill `k`. Survivors come back in their population order, as
    annotated copies.
    """
    if not 1 <= k <= len(pop):
        raise BadK(f"k={k} outside [1, {len(pop)}]")
    seen = {}
    dup_idx = []
    for i, c in enumerate(pop):
        if c.id in seen:
            dup_idx.append(i)
        else:
            seen[c.id] = i
    uniq_idx = list(seen.values())
    uniq = [replace(pop[i]) for i in uniq_idx]
    fronts = non_dominated_sort(uniq)

    chosen: list[int] = []
    for front in fronts:
        members = [uniq[i] for i in front]
        for c, d in zip(members, crowding_distance(members)):
            c.crowding = d
        room = k - len(chosen)
        if room <= 0:
            break
        if len(front) <= room:
            chosen.extend(front)
        else:
            ranked = sorted(front, key=lambda i: (-uniq[i].crowding, uniq[i].id))
            chosen.extend(ranked[:room])
            break

    annotated = {uniq_idx[i]: uniq[i] for i in range(len(uniq))}
    picked = [uniq_idx[i] for i in chosen]
    if len(picked) < k:
        picked.extend(dup_idx[: k - len(picked)])
    out = []
    for i in sorted(picked):
        src = annotated.get(i)
        if src is None:
            src = annotated[seen[pop[i].id]]
        out.append(replace(src))
    return out
