"""Analytic parameter and multiply-add counts for decoded architectures.

Counting conventions:

* convolutions followed by batch norm carry no bias; every batch norm adds a
  scale and a shift per channel;
* the 1x1 conv after global pooling and the classifier have biases and no
  batch norm;
* SE squeezes the expanded width to ``ceil(c_exp / 4)`` with two biased
  fully connected layers;
* one multiply-accumulate counts as one operation. Pooling, activations and
  elementwise ops are free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DomainError
from .search_space import (
    DEFAULT_RESOLUTION,
    NUM_CHOICES,
    NUM_LAYERS,
    ArchitectureSpec,
    Block,
    ConvLayer,
    decode_architecture,
)

SE_REDUCTION = 4


@dataclass(frozen=True)
class LayerCost:
    name: str
    kind: str  # "conv": scales with input area; "se"/"pooled": evaluated at 1x1
    params: int
    madds: int


@dataclass(frozen=True)
class ModelStats:
    param_count: int
    madds: int

    @property
    def params_m(self) -> float:
        return self.param_count / 1e6

    @property
    def madds_m(self) -> float:
        return self.madds / 1e6


def se_channels(expanded: int) -> int:
    return math.ceil(expanded / SE_REDUCTION)


def conv_cost(layer: ConvLayer, res: int, kind: str = "conv") -> LayerCost:
    weights = layer.kernel * layer.kernel * layer.in_channels * layer.out_channels
    params = weights
    if layer.batch_norm:
        params += 2 * layer.out_channels
    if layer.bias:
        params += layer.out_channels
    out = res // layer.stride
    return LayerCost(layer.name, kind, params, weights * out * out)


def block_costs(block: Block, res: int) -> list[LayerCost]:
    c_in, c_exp, c_out = block.in_channels, block.expanded_channels, block.out_channels
    out = res // block.stride
    name = f"block{block.index}"
    costs = []
    if block.has_expansion_conv:
        w = c_in * c_exp
        costs.append(LayerCost(f"{name}.expand", "conv", w + 2 * c_exp, w * res * res))
    w = block.kernel * block.kernel * c_exp
    costs.append(LayerCost(f"{name}.depthwise", "conv", w + 2 * c_exp, w * out * out))
    if block.se:
        r = se_channels(c_exp)
        w = 2 * c_exp * r
        costs.append(LayerCost(f"{name}.se", "se", w + r + c_exp, w))
    w = c_exp * c_out
    costs.append(LayerCost(f"{name}.project", "conv", w + 2 * c_out, w * out * out))
    return costs


def layer_costs(arch: ArchitectureSpec, resolution: int | None = None) -> list[LayerCost]:
    """Per-layer breakdown; ``resolution`` overrides the architecture's input size."""
    res = arch.input_resolution if resolution is None else resolution
    if res <= 0 or res % 32:
        raise DomainError(f"resolution {res} is not a positive multiple of 32")

    conv, first = arch.stem
    costs = [conv_cost(conv, res)]
    res //= conv.stride
    costs += block_costs(first, res)
    for block in arch.blocks:
        costs += block_costs(block, res)
        res //= block.stride
    costs.append(conv_cost(arch.head, res))
    costs.append(conv_cost(arch.feature, 1, kind="pooled"))
    costs.append(conv_cost(arch.classifier, 1, kind="pooled"))
    return costs


def count_params(arch: ArchitectureSpec) -> int:
    return sum(c.params for c in layer_costs(arch))


def count_madds(arch: ArchitectureSpec, resolution: int = DEFAULT_RESOLUTION) -> int:
    return sum(c.madds for c in layer_costs(arch, resolution))


def model_stats(
    m: Sequence[int], num_classes: int = 1000, resolution: int = DEFAULT_RESOLUTION
) -> ModelStats:
    arch = decode_architecture(m, num_classes)
    return ModelStats(count_params(arch), count_madds(arch, resolution))


@dataclass(frozen=True)
class BlockCostTable:
    """Costs split into the searchable blocks and everything else.

    Block i's cost depends only on its own choice (its input width and
    resolution are fixed by the skeleton), so any model's total is
    ``fixed + sum_i table[i, gene_i]``.
    """

    params: np.ndarray  # (14, 12)
    madds: np.ndarray  # (14, 12)
    fixed_params: int
    fixed_madds: int


@lru_cache(maxsize=16)
def block_cost_table(num_classes: int = 1000, resolution: int = DEFAULT_RESOLUTION) -> BlockCostTable:
    params = np.zeros((NUM_LAYERS, NUM_CHOICES), dtype=np.int64)
    madds = np.zeros((NUM_LAYERS, NUM_CHOICES), dtype=np.int64)
    fixed_p = fixed_m = 0
    for j in range(NUM_CHOICES):
        fixed_p = fixed_m = 0
        arch = decode_architecture((j,) * NUM_LAYERS, num_classes)
        for c in layer_costs(arch, resolution):
            owner = c.name.split(".")[0]
            if owner.startswith("block") and owner != "block0":
                layer = int(owner[len("block"):]) - 1
                params[layer, j] += c.params
                madds[layer, j] += c.madds
            else:
                fixed_p += c.params
                fixed_m += c.madds
    params.setflags(write=False)
    madds.setflags(write=False)
    return BlockCostTable(params, madds, fixed_p, fixed_m)


def param_range(num_classes: int = 1000) -> tuple[int, int]:
    """Smallest and largest parameter count over the whole search space."""
    t = block_cost_table(num_classes)
    return (
        t.fixed_params + int(t.params.min(axis=1).sum()),
        t.fixed_params + int(t.params.max(axis=1).sum()),
    )
