"""Procedural classification data: warped Gaussian clusters with fixed splits."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

SPLIT_NAMES = ("train", "val", "test")


@dataclass(frozen=True)
class DatasetSpec:
    classes: int = 3
    dims: int = 8
    per_class: int = 200
    warp: float = 1.0
    separation: float = 2.0

    def __post_init__(self):
        if self.classes < 1 or self.dims < 1 or self.per_class < 1:
            raise ValueError("classes, dims and per_class must be >= 1")
        if self.warp < 0 or self.separation < 0:
            raise ValueError("warp and separation must be >= 0")


@dataclass
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    splits: dict[str, np.ndarray]
    num_classes: int

    @property
    def dims(self) -> int:
        return self.features.shape[1]

    def __len__(self):
        return len(self.labels)


def _warp(x: np.ndarray, strength: float, rng: np.random.Generator) -> np.ndarray:
    d = x.shape[1]
    mix = rng.normal(0.0, 1.0 / np.sqrt(d), size=(d, d))
    phase = rng.uniform(0, 2 * np.pi, size=d)
    return x + strength * np.sin(x @ mix * 1.5 + phase) * 1.5


def make_dataset(spec: DatasetSpec, seed: int) -> Dataset:
    rng = np.random.default_rng([int(seed), 0xDA7A])
    means = rng.normal(0.0, spec.separation, size=(spec.classes, spec.dims))
    labels = np.repeat(np.arange(spec.classes), spec.per_class)
    x = means[labels] + rng.normal(size=(len(labels), spec.dims))
    warp_rng = np.random.default_rng([int(seed), 0x3A49])
    x = _warp(x, spec.warp, warp_rng)

    n = len(labels)
    order = rng.permutation(n)
    n_train = int(0.7 * n)
    n_val = int(0.15 * n)
    splits = {
        "train": np.sort(order[:n_train]),
        "val": np.sort(order[n_train:n_train + n_val]),
        "test": np.sort(order[n_train + n_val:]),
    }
    return Dataset(x, labels, splits, spec.classes)


def save_dataset(ds: Dataset, path) -> None:
    """Columnar text: a header line, then one row per sample grouped by split."""
    lines = [
        f"# dims={ds.dims} classes={ds.num_classes} "
        + " ".join(f"{s}={len(ds.splits[s])}" for s in SPLIT_NAMES),
        ",".join([f"x{i}" for i in range(ds.dims)] + ["label"]),
    ]
    for s in SPLIT_NAMES:
        for row in ds.splits[s]:
            feats = ",".join(repr(float(v)) for v in ds.features[row])
            lines.append(f"{feats},{int(ds.labels[row])}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_dataset(path) -> Dataset:
    text = Path(path).read_text().splitlines()
    header = dict(tok.split("=") for tok in text[0].lstrip("# ").split())
    dims, classes = int(header["dims"]), int(header["classes"])
    rows = [line.split(",") for line in text[2:] if line]
    features = np.array([[float(v) for v in r[:dims]] for r in rows]).reshape(len(rows), dims)
    labels = np.array([int(r[dims]) for r in rows], dtype=int)
    splits, start = {}, 0
    for s in SPLIT_NAMES:
        n = int(header[s])
        splits[s] = np.arange(start, start + n)
        start += n
    if start != len(rows):
        raise ValueError(f"header counts {start} rows, file has {len(rows)}")
    return Dataset(features, labels, splits, classes)
