"""Search space, genome representation and variation operators.

A genome is one op index per searchable block. The default space is the
3D MBConv supernet: a stem, six layers each opened by a pointwise
calibration block, and eight candidate ops per searchable block.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import InvalidGenome, MalformedEncoding, SpaceMismatch

SKIP = "skip"
MBCONV = "mbconv"
DENSE = "dense"


@dataclass(frozen=True)
class CandidateOp:
    kind: str
    kernel: int | None = None
    expansion: int | None = None

    def __post_init__(self):
        if self.kind == SKIP:
            if self.kernel is not None or self.expansion is not None:
                raise ValueError("skip takes no kernel/expansion")
        elif self.kind == MBCONV:
            if self.kernel is None or self.kernel % 2 != 1 or self.kernel < 1:
                raise ValueError(f"MBConv needs an odd kernel, got {self.kernel}")
            if self.expansion is None or self.expansion < 1:
                raise ValueError(f"MBConv needs an expansion >= 1, got {self.expansion}")
        elif self.kind == DENSE:
            if self.kernel is not None or self.expansion is None or self.expansion < 1:
                raise ValueError("dense op takes an expansion and no kernel")
        else:
            raise ValueError(f"unknown op kind {self.kind!r}")

    @property
    def label(self) -> str:
        if self.kind == SKIP:
            return "skip"
        if self.kind == MBCONV:
            return f"mbconv{self.kernel}_{self.expansion}"
        return f"dense{self.expansion}"


def default_ops() -> tuple[CandidateOp, ...]:
    pairs = [(3, 3), (3, 4), (3, 6), (5, 3), (5, 4), (7, 3), (7, 4)]
    return (CandidateOp(SKIP),) + tuple(CandidateOp(MBCONV, k, e) for k, e in pairs)


@dataclass(frozen=True)
class SearchSpace:
    name: str = "mbconv3d"
    num_layers: int = 6
    blocks_per_layer: tuple[int, ...] = (4, 4, 4, 4, 4, 1)
    calibration_strides: tuple[int, ...] = (2, 2, 2, 1, 2, 1)
    stem_channels: int = 32
    layer_channels: tuple[int, ...] = (24, 40, 80, 96, 192, 320)
    ops: tuple[CandidateOp, ...] = field(default_factory=default_ops)
    bytes_per_param: int = 4
    in_channels: int = 3
    num_classes: int = 3

    def __post_init__(self):
        for attr in ("blocks_per_layer", "calibration_strides", "layer_channels", "ops"):
            object.__setattr__(self, attr, tuple(getattr(self, attr)))
        n = self.num_layers
        if n < 1:
            raise ValueError("num_layers must be >= 1")
        if not (len(self.blocks_per_layer) == len(self.calibration_strides)
                == len(self.layer_channels) == n):
            raise ValueError("per-layer lists must all have num_layers entries")
        if any(b < 0 for b in self.blocks_per_layer) or self.total_blocks < 1:
            raise ValueError("need at least one searchable block")
        if not self.ops:
            raise ValueError("op set is empty")

    @property
    def total_blocks(self) -> int:
        return sum(self.blocks_per_layer)

    @property
    def num_ops(self) -> int:
        return len(self.ops)

    def block_layers(self) -> list[int]:
        """Layer index of every searchable block, in genome order."""
        return [i for i, b in enumerate(self.blocks_per_layer) for _ in range(b)]

    def validate(self, g: "Genome") -> "Genome":
        if len(g.choices) != self.total_blocks:
            raise InvalidGenome(
                f"genome has {len(g.choices)} blocks, space {self.name!r} has {self.total_blocks}")
        for c in g.choices:
            if not 0 <= c < self.num_ops:
                raise InvalidGenome(f"choice {c} outside [0, {self.num_ops})")
        return g


def mlp_space(slots: int = 4, width: int = 16, expansions: Sequence[int] = (1, 2, 4),
              num_classes: int = 3) -> SearchSpace:
    """Space for the toy dense supernet: one searchable block per slot."""
    ops = (CandidateOp(SKIP),) + tuple(CandidateOp(DENSE, None, e) for e in expansions)
    return SearchSpace(
        name=f"mlp{slots}x{width}",
        num_layers=slots,
        blocks_per_layer=(1,) * slots,
        calibration_strides=(1,) * slots,
        stem_channels=width,
        layer_channels=(width,) * slots,
        ops=ops,
        num_classes=num_classes,
    )


def genome_id(choices: Sequence[int]) -> str:
    """Content hash over the little-endian uint16 encoding of the choices."""
    raw = np.asarray(choices, dtype="<u2").tobytes()
    return hashlib.sha256(raw).hexdigest()[:16]


@dataclass(frozen=True)
class Genome:
    choices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "choices", tuple(int(c) for c in self.choices))

    @cached_property
    def id(self) -> str:
        return genome_id(self.choices)

    def __len__(self):
        return len(self.choices)


def random_genome(space: SearchSpace, rng: np.random.Generator) -> Genome:
    return Genome(rng.integers(0, space.num_ops, size=space.total_blocks))


def encode_onehot(g: Genome, space: SearchSpace) -> np.ndarray:
    space.validate(g)
    bits = np.zeros((space.total_blocks, space.num_ops), dtype=np.uint8)
    bits[np.arange(space.total_blocks), g.choices] = 1
    return bits.ravel()


def decode_onehot(bits, space: SearchSpace) -> Genome:
    bits = np.asarray(bits)
    expected = space.total_blocks * space.num_ops
    if bits.ndim != 1 or bits.size != expected:
        raise MalformedEncoding(f"expected {expected} bits, got shape {bits.shape}")
    if not np.isin(bits, (0, 1)).all():
        raise MalformedEncoding("bits must be 0 or 1")
    seg = bits.reshape(space.total_blocks, space.num_ops)
    hot = seg.sum(axis=1)
    bad = np.flatnonzero(hot != 1)
    if bad.size:
        raise MalformedEncoding(f"segment {bad[0]} has {hot[bad[0]]} ones")
    return Genome(seg.argmax(axis=1))


def crossover(a: Genome, b: Genome, rng: np.random.Generator) -> Genome:
    """Uniform crossover at block granularity (whole one-hot segments)."""
    if len(a) != len(b):
        raise SpaceMismatch(f"parents differ in length: {len(a)} vs {len(b)}")
    take_a = rng.random(len(a)) < 0.5
    return Genome(np.where(take_a, a.choices, b.choices))


def mutate(g: Genome, per_block_rate: float, rng: np.random.Generator,
           num_ops: int) -> Genome:
    """Resample each block uniformly over the op set with `per_block_rate`."""
    if not 0.0 <= per_block_rate <= 1.0:
        raise ValueError(f"per_block_rate must lie in [0, 1], got {per_block_rate}")
    n = len(g)
    hit = rng.random(n) < per_block_rate
    fresh = rng.integers(0, num_ops, size=n)
    return Genome(np.where(hit, fresh, g.choices))


def default_mutation_rate(space: SearchSpace) -> float:
    return 1.0 / space.total_blocks


# -- size model -------------------------------------------------------------

def _bn(c: int) -> int:
    return 2 * c


def op_param_count(op: CandidateOp, c_in: int, c_out: int) -> int:
    if op.kind == SKIP:
        return 0
    inner = op.expansion * c_in
    if op.kind == MBCONV:
        return (c_in * inner + _bn(inner)
                + op.kernel ** 3 * inner + _bn(inner)
                + inner * c_out + _bn(c_out))
    raise ValueError(f"no convolutional size model for {op.label}")


def param_count(g: Genome, space: SearchSpace) -> int:
    space.validate(g)
    total = 3 ** 3 * space.in_channels * space.stem_channels + _bn(space.stem_channels)
    c_prev = space.stem_channels
    choices = iter(g.choices)
    for i, c in enumerate(space.layer_channels):
        total += c_prev * c + _bn(c)
        for _ in range(space.blocks_per_layer[i]):
            total += op_param_count(space.ops[next(choices)], c, c)
        c_prev = c
    total += c_prev * space.num_classes + space.num_classes
    return total


def model_size_mb(g: Genome, space: SearchSpace) -> float:
    return param_count(g, space) * space.bytes_per_param / 2 ** 20


# -- serialization ------------------------------------------------------------

def genome_to_json(g: Genome, space: SearchSpace) -> str:
    return json.dumps({"space": space.name, "choices": list(g.choices)})


def genome_from_json(text: str, space: SearchSpace) -> Genome:
    data = json.loads(text)
    if data.get("space") != space.name:
        raise SpaceMismatch(f"genome is for space {data.get('space')!r}, not {space.name!r}")
    return space.validate(Genome(data["choices"]))
