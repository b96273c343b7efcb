"""
Genomes, one-hot codes and model size
=====================================

A genome picks one candidate op for each of the 21 searchable blocks of the
default 3D MBConv space. This walk-through builds a few genomes, encodes
them, recombines them and prices them in megabytes.
"""

import numpy as np

from evonas.space import (SearchSpace, crossover, decode_onehot, encode_onehot, model_size_mb,
                          mutate, param_count, random_genome)

space = SearchSpace()
rng = np.random.default_rng(0)
print([op.label for op in space.ops])

# %%
# A random genome and its one-hot code. Each 8-bit segment has exactly one
# set bit, so decoding recovers the genome.
g = random_genome(space, rng)
bits = encode_onehot(g, space)
print(g.id, g.choices)
print(bits.reshape(space.total_blocks, space.num_ops)[:4])
assert decode_onehot(bits, space) == g

# %%
# Crossover swaps whole segments, so the child stays valid. Mutation redraws
# each block with a small probability.
h = random_genome(space, rng)
child = crossover(g, h, rng)
mutant = mutate(child, 0.2, rng, space.num_ops)
for name, x in [("parent a", g), ("parent b", h), ("child", child), ("mutant", mutant)]:
    print(f"{name:9s}", "".join(str(c) for c in x.choices))

# %%
# Size comes from a parameter count with no conv biases and two BN parameters
# per channel. All-skip is the floor; the widest op everywhere is the ceiling.
floor = type(g)([0] * space.total_blocks)
ceiling = type(g)([7] * space.total_blocks)
for name, x in [("all skip", floor), ("random", g), ("all mbconv7_4", ceiling)]:
    print(f"{name:14s} {param_count(x, space):>10,d} params  {model_size_mb(x, space):7.3f} MB")
