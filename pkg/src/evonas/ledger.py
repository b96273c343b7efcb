"""Per-genome sample histories and the potential objective.

Each sampled genome keeps the epochs at which it was evaluated and the
validation accuracy it scored there. Potential is the least-squares slope
of accuracy against epoch, fitted through the origin by default.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import EmptyHistory, InsufficientHistory, NonMonotoneEpoch

ACCURACY = "accuracy"
POTENTIAL = "potential"
SIZE = "size_mb"
OBJECTIVE_NAMES = (ACCURACY, POTENTIAL, SIZE)

MAXIMIZE = "max"
MINIMIZE = "min"
DIRECTIONS = {ACCURACY: MAXIMIZE, POTENTIAL: MAXIMIZE, SIZE: MINIMIZE}

ORIGIN = "origin"
INTERCEPT = "intercept"


@dataclass
class History:
    epochs: list[int] = field(default_factory=list)
    accuracies: list[float] = field(default_factory=list)

    def __len__(self):
        return len(self.epochs)

    def append(self, epoch: int, acc: float) -> None:
        if epoch < 1:
            raise NonMonotoneEpoch(f"epochs are 1-based, got {epoch}")
        if self.epochs and epoch <= self.epochs[-1]:
            raise NonMonotoneEpoch(f"epoch {epoch} does not follow {self.epochs[-1]}")
        if not 0.0 <= acc <= 1.0:
            raise ValueError(f"accuracy {acc} outside [0, 1]")
        self.epochs.append(int(epoch))
        self.accuracies.append(float(acc))


def potential(h: History) -> float:
    """Slope of the through-origin least-squares fit of accuracy on epoch."""
    if len(h) == 0:
        raise EmptyHistory("potential needs at least one sample")
    # epochs are integers and accuracies are doubles, so the ratio is an exact
    # rational; round it once instead of rounding two sums and a quotient
    ratios = [float(f).as_integer_ratio() for f in h.accuracies]
    scale = max(d for _, d in ratios)     # every denominator is a power of two
    num = sum(e * n * (scale // d) for e, (n, d) in zip(h.epochs, ratios))
    den = scale * sum(e * e for e in h.epochs)
    return num / den                      # int / int is correctly rounded


def potential_with_intercept(h: History) -> float:
    """Slope of the ordinary least-squares line with an intercept term."""
    m = len(h)
    if m < 2:
        raise InsufficientHistory(f"intercept fit needs m >= 2, got {m}")
    e_mean = math.fsum(h.epochs) / m
    f_mean = math.fsum(h.accuracies) / m
    num = math.fsum((e - e_mean) * (f - f_mean) for e, f in zip(h.epochs, h.accuracies))
    den = math.fsum((e - e_mean) ** 2 for e in h.epochs)
    return num / den


class Ledger:
    """Append-only map from genome id to its sample history."""

    def __init__(self):
        self._histories: dict[str, History] = {}

    def __contains__(self, gid):
        return gid in self._histories

    def __len__(self):
        return len(self._histories)

    def ids(self) -> list[str]:
        return sorted(self._histories)

    def history(self, gid: str) -> History:
        # unseen ids have an empty history; return a detached copy
        h = self._histories.get(gid)
        if h is None:
            return History()
        return History(list(h.epochs), list(h.accuracies))

    def record_sample(self, gid: str, epoch: int, acc: float) -> "Ledger":
        h = self._histories.get(gid)
        if h is None:
            h = History()
            h.append(epoch, acc)
            self._histories[gid] = h
        else:
            h.append(epoch, acc)
        return self

    def to_records(self) -> list[dict]:
        """One record per sample in canonical (epoch, id) order."""
        rows = [
            {"epoch": e, "genome_id": gid, "accuracy": f}
            for gid, h in self._histories.items()
            for e, f in zip(h.epochs, h.accuracies)
        ]
        rows.sort(key=lambda r: (r["epoch"], r["genome_id"]))
        return rows

    @classmethod
    def from_records(cls, records: Iterable[dict]) -> "Ledger":
        ledger = cls()
        for r in sorted(records, key=lambda r: (r["epoch"], r["genome_id"])):
            ledger.record_sample(r["genome_id"], r["epoch"], r["accuracy"])
        return ledger

    def __eq__(self, other):
        if not isinstance(other, Ledger):
            return NotImplemented
        return self.to_records() == other.to_records()


@dataclass(frozen=True)
class ObjectiveVector:
    values: tuple[float, ...]
    directions: tuple[str, ...]
    names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "directions", tuple(self.directions))
        object.__setattr__(self, "names", tuple(self.names))
        if not len(self.values) == len(self.directions) == len(self.names) >= 1:
            raise ValueError("values, directions and names must have equal length >= 1")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values))


def normalize_objectives(objectives: Sequence[str]) -> tuple[str, ...]:
    objectives = tuple(objectives)
    if not objectives:
        raise ValueError("objective set is empty")
    unknown = [o for o in objectives if o not in DIRECTIONS]
    if unknown:
        raise ValueError(f"unknown objectives {unknown}; choose from {OBJECTIVE_NAMES}")
    if len(set(objectives)) != len(objectives):
        raise ValueError(f"repeated objective in {objectives}")
    return objectives


def objective_vector(gid: str, ledger: Ledger, size_mb: float,
                     objectives: Sequence[str], variant: str = ORIGIN) -> ObjectiveVector:
    """Objective vector of one genome, entries in the order of `objectives`.

    The intercept variant has no slope for a single sample; such genomes get a
    flat trend of 0.0 so that freshly sampled models remain comparable.
    """
    objectives = normalize_objectives(objectives)
    h = ledger.history(gid)
    values = []
    for name in objectives:
        if name == ACCURACY:
            if len(h) == 0:
                raise EmptyHistory(f"no samples recorded for {gid}")
            values.append(h.accuracies[-1])
        elif name == POTENTIAL:
            if variant == ORIGIN:
                values.append(potential(h))
            elif variant == INTERCEPT:
                if len(h) == 0:
                    raise EmptyHistory(f"no samples recorded for {gid}")
                values.append(potential_with_intercept(h) if len(h) >= 2 else 0.0)
            else:
                raise ValueError(f"unknown potential variant {variant!r}")
        else:
            values.append(float(size_mb))
    return ObjectiveVector(values, [DIRECTIONS[n] for n in objectives], objectives)
