"""Layer-wise inverted-bottleneck search space.

Every searchable layer picks one of twelve block configurations (expansion
ratio x kernel size x squeeze-and-excitation). A model is a 14-gene chromosome
of choice indices, placed on a fixed MobileNetV3-large-shaped skeleton.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ChromosomeParseError, ConfigError, DomainError

NUM_LAYERS = 14
NUM_CHOICES = 12

Chromosome = tuple[int, ...]


@dataclass(frozen=True, order=True)
class BlockChoice:
    expansion: int
    kernel: int
    se: bool

    @property
    def label(self) -> str:
        return f"MBE{self.expansion}_K{self.kernel}" + ("_SE" if self.se else "")


# Row order is the public index order; external tools rely on it.
CHOICES: tuple[BlockChoice, ...] = tuple(
    BlockChoice(t, k, se) for t in (3, 6) for k in (3, 5, 7) for se in (False, True)
)
_INDEX = {c: i for i, c in enumerate(CHOICES)}


@dataclass(frozen=True)
class SkeletonLayer:
    index: int  # 1-based
    out_channels: int
    stride: int
    nonlinearity: str  # "RE" or "HS"


SKELETON_CHANNELS = (24, 24, 40, 40, 40, 80, 80, 80, 80, 112, 112, 160, 160, 160)
SKELETON_STRIDES = (2, 1, 2, 1, 1, 2, 1, 1, 1, 1, 1, 2, 1, 1)
SKELETON_NL = ("RE",) * 5 + ("HS",) * 9

SKELETON: tuple[SkeletonLayer, ...] = tuple(
    SkeletonLayer(i + 1, c, s, nl)
    for i, (c, s, nl) in enumerate(zip(SKELETON_CHANNELS, SKELETON_STRIDES, SKELETON_NL))
)

STEM_CHANNELS = 16
HEAD_CHANNELS = 960
FEATURE_CHANNELS = 1280
DEFAULT_RESOLUTION = 224

# Named genotypes. MOGA_A_ALT is a second published rendering of MOGA_A
# with SE on layer 3 instead of layer 6; MOGA_A is canonical.
MOGA_A: Chromosome = (8, 10, 6, 7, 1, 7, 6, 10, 5, 10, 6, 6, 9, 9)
MOGA_A_ALT: Chromosome = (8, 10, 7, 7, 1, 6, 6, 10, 5, 10, 6, 6, 9, 9)
MOGA_B: Chromosome = (0, 0, 10, 0, 8, 7, 9, 0, 11, 10, 2, 11, 11, 7)
MOGA_C: Chromosome = (2, 0, 2, 0, 2, 2, 9, 2, 2, 6, 7, 7, 7, 7)

SEARCH_SPACE_SIZE = NUM_CHOICES**NUM_LAYERS


def choice_of_index(idx: int) -> BlockChoice:
    if isinstance(idx, bool) or not isinstance(idx, (int, np.integer)):
        raise DomainError(f"choice index must be an integer, got {idx!r}")
    if not 0 <= idx < NUM_CHOICES:
        raise DomainError(f"choice index {idx} outside 0..{NUM_CHOICES - 1}")
    return CHOICES[int(idx)]


def index_of_choice(choice: BlockChoice) -> int:
    try:
        return _INDEX[BlockChoice(int(choice.expansion), int(choice.kernel), bool(choice.se))]
    except KeyError:
        raise DomainError(
            f"no block with expansion={choice.expansion}, kernel={choice.kernel}"
        ) from None


def validate_chromosome(genes: Iterable[int]) -> Chromosome:
    """Return ``genes`` as a tuple, raising :class:`DomainError` if illegal."""
    m = tuple(int(g) for g in genes)
    if len(m) != NUM_LAYERS:
        raise DomainError(f"expected {NUM_LAYERS} genes, found {len(m)}")
    for pos, g in enumerate(m):
        if not 0 <= g < NUM_CHOICES:
            raise DomainError(f"gene {pos + 1} = {g} outside 0..{NUM_CHOICES - 1}")
    return m


def parse_chromosome(text: str) -> Chromosome:
    """Parse the comma-separated text form, e.g. ``"8,10,6,7,1,7,6,10,5,10,6,6,9,9"``."""
    parts = [p.strip() for p in text.strip().split(",")]
    if parts == [""]:
        parts = []
    genes = []
    for pos, p in enumerate(parts, start=1):
        try:
            g = int(p)
        except ValueError:
            raise ChromosomeParseError(f"gene at position {pos} is not an integer: {p!r}") from None
        if not 0 <= g < NUM_CHOICES:
            raise ChromosomeParseError(
                f"gene at position {pos} is {g}, expected 0..{NUM_CHOICES - 1}"
            )
        genes.append(g)
    if len(genes) != NUM_LAYERS:
        raise ChromosomeParseError(f"expected {NUM_LAYERS} genes, found {len(genes)}")
    return tuple(genes)


def format_chromosome(m: Sequence[int]) -> str:
    return ",".join(str(int(g)) for g in m)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def _check_pinned(pinned: Mapping[int, int] | None) -> dict[int, int]:
    if not pinned:
        return {}
    out = {}
    for layer, g in pinned.items():
        if not 0 <= int(layer) < NUM_LAYERS:
            raise ConfigError(f"pinned layer {layer} outside 0..{NUM_LAYERS - 1}")
        if not 0 <= int(g) < NUM_CHOICES:
            raise ConfigError(f"pinned choice {g} outside 0..{NUM_CHOICES - 1}")
        out[int(layer)] = int(g)
    return out


def free_layers(pinned: Mapping[int, int] | None = None) -> list[int]:
    """0-based indices of the layers the search may change."""
    pins = _check_pinned(pinned)
    return [i for i in range(NUM_LAYERS) if i not in pins]


def random_chromosome(
    rng: np.random.Generator, pinned: Mapping[int, int] | None = None
) -> Chromosome:
    """Draw every gene independently and uniformly; pinned layers keep their value."""
    genes = rng.integers(0, NUM_CHOICES, size=NUM_LAYERS)
    for layer, g in _check_pinned(pinned).items():
        genes[layer] = g
    return tuple(int(g) for g in genes)


def diversity_init(
    n: int, rng: np.random.Generator, pinned: Mapping[int, int] | None = None
) -> list[Chromosome]:
    """Initial population in which every free layer sees all twelve choices.

    The first 12 chromosomes take one independent random permutation of
    0..11 per free layer (so every column is a full cover and no two of them
    are equal); the rest are uniform draws, rejecting duplicates.
    """
    if n < NUM_CHOICES:
        raise ConfigError(f"population size must be >= {NUM_CHOICES}, got {n}")
    pins = _check_pinned(pinned)
    free = free_layers(pins)
    if not free:
        raise ConfigError("all layers are pinned; nothing to search")
    if NUM_CHOICES ** len(free) < n:
        raise ConfigError(
            f"only {NUM_CHOICES ** len(free)} distinct chromosomes with "
            f"{len(free)} free layers, cannot draw {n}"
        )

    cover = np.zeros((NUM_CHOICES, NUM_LAYERS), dtype=np.int64)
    for layer in range(NUM_LAYERS):
        if layer in pins:
            cover[:, layer] = pins[layer]
        else:
            cover[:, layer] = rng.permutation(NUM_CHOICES)

    population = [tuple(int(g) for g in row) for row in cover]
    seen = set(population)
    while len(population) < n:
        m = random_chromosome(rng, pins)
        if m not in seen:
            seen.add(m)
            population.append(m)
    return population


# ---------------------------------------------------------------------------
# Decoding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvLayer:
    """Plain convolution in the stem or tail."""

    name: str
    kernel: int
    in_channels: int
    out_channels: int
    stride: int
    nonlinearity: str | None
    in_resolution: int
    batch_norm: bool = True
    bias: bool = False

    @property
    def out_resolution(self) -> int:
        return self.in_resolution // self.stride


@dataclass(frozen=True)
class Block:
    """Inverted-bottleneck block: expand 1x1, depthwise kxk, optional SE, project 1x1."""

    index: int  # 0 for the fixed stem block, 1..14 for searchable layers
    expansion: int
    kernel: int
    se: bool
    in_channels: int
    out_channels: int
    stride: int
    nonlinearity: str
    in_resolution: int

    @property
    def expanded_channels(self) -> int:
        return self.in_channels * self.expansion

    @property
    def out_resolution(self) -> int:
        return self.in_resolution // self.stride

    @property
    def has_expansion_conv(self) -> bool:
        return not (self.expansion == 1 and self.in_channels == self.expanded_channels)

    @property
    def label(self) -> str:
        return f"MBE{self.expansion}_K{self.kernel}" + ("_SE" if self.se else "")


@dataclass(frozen=True)
class ArchitectureSpec:
    """Structural description of a decoded network; no weights, no tensors."""

    chromosome: Chromosome
    num_classes: int
    input_resolution: int
    stem: tuple[ConvLayer, Block]
    blocks: tuple[Block, ...]
    head: ConvLayer  # 1x1 conv to 960 channels on the last feature map
    feature: ConvLayer  # 1x1 conv to 1280 channels after global pooling
    classifier: ConvLayer

    @property
    def pooled_resolution(self) -> int:
        return self.head.out_resolution


def decode_architecture(
    m: Sequence[int], num_classes: int = 1000, input_resolution: int = DEFAULT_RESOLUTION
) -> ArchitectureSpec:
    m = validate_chromosome(m)
    if num_classes < 1:
        raise DomainError(f"num_classes must be positive, got {num_classes}")
    if input_resolution % 32:
        raise DomainError(f"input resolution {input_resolution} is not divisible by 32")

    res = input_resolution
    conv = ConvLayer("conv_stem", 3, 3, STEM_CHANNELS, 2, "HS", res)
    res = conv.out_resolution
    first = Block(0, 1, 3, False, STEM_CHANNELS, STEM_CHANNELS, 1, "RE", res)

    blocks = []
    c_in = STEM_CHANNELS
    for layer, g in zip(SKELETON, m):
        choice = CHOICES[g]
        b = Block(
            layer.index, choice.expansion, choice.kernel, choice.se,
            c_in, layer.out_channels, layer.stride, layer.nonlinearity, res,
        )
        blocks.append(b)
        c_in = b.out_channels
        res = b.out_resolution

    head = ConvLayer("conv_head", 1, c_in, HEAD_CHANNELS, 1, "HS", res)
    feature = ConvLayer(
        "conv_feature", 1, HEAD_CHANNELS, FEATURE_CHANNELS, 1, "HS", 1,
        batch_norm=False, bias=True,
    )
    classifier = ConvLayer(
        "classifier", 1, FEATURE_CHANNELS, num_classes, 1, None, 1,
        batch_norm=False, bias=True,
    )
    return ArchitectureSpec(
        m, num_classes, input_resolution, (conv, first), tuple(blocks), head, feature, classifier
    )
