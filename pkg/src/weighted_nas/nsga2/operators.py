"""Selection and variation operators on 14-gene chromosomes."""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from ..errors import ConfigError
from ..search_space import NUM_CHOICES, NUM_LAYERS, Chromosome, random_chromosome
from .objectives import Individual

MAX_REDRAWS = 10


def binary_tournament(pool: Sequence[Individual], rng: np.random.Generator) -> Individual:
    """Two contestants drawn without replacement; the crowded-comparison winner is kept."""
    i, j = rng.choice(len(pool), size=2, replace=False)
    a, b = pool[int(i)], pool[int(j)]
    return a if a.sort_key() <= b.sort_key() else b


def tournament_select(
    pool: Sequence[Individual], rng: np.random.Generator
) -> tuple[Individual, Individual]:
    """Pick a parent pair by two independent binary tournaments.

    The second parent must carry a different chromosome: the tournament is
    re-run up to ``MAX_REDRAWS`` times, then held among the members that
    differ from the first parent. Duplication is accepted only when the whole
    pool shares one chromosome.
    """
    if len(pool) < 2:
        raise ConfigError(f"tournament needs a pool of at least 2, got {len(pool)}")
    first = binary_tournament(pool, rng)
    for _ in range(MAX_REDRAWS):
        second = binary_tournament(pool, rng)
        if second.chromosome != first.chromosome:
            return first, second
    others = [ind for ind in pool if ind.chromosome != first.chromosome]
    if len(others) >= 2:
        return first, binary_tournament(others, rng)
    if others:
        return first, others[0]
    return first, second


def single_point_crossover(
    m1: Sequence[int], m2: Sequence[int], rng: np.random.Generator, prob: float = 1.0
) -> tuple[Chromosome, Chromosome]:
    """Swap suffixes after a cut point k drawn uniformly from 1..13.

    With probability ``1 - prob`` no cut is made and the children are copies.
    """
    m1, m2 = tuple(m1), tuple(m2)
    if rng.random() >= prob:
        return m1, m2
    k = int(rng.integers(1, NUM_LAYERS))
    return cut_and_swap(m1, m2, k)


def cut_and_swap(m1: Sequence[int], m2: Sequence[int], k: int) -> tuple[Chromosome, Chromosome]:
    if not 1 <= k < NUM_LAYERS:
        raise ValueError(f"cut point {k} outside 1..{NUM_LAYERS - 1}")
    return tuple(m1[:k]) + tuple(m2[k:]), tuple(m2[:k]) + tuple(m1[k:])


def hierarchical_mutation(
    m: Sequence[int],
    rng: np.random.Generator,
    p_layer: float = 0.1,
    p_resample: float = 0.2,
    pinned: Mapping[int, int] | None = None,
) -> Chromosome:
    """Two-level mutation.

    With probability ``p_resample`` the whole chromosome is redrawn uniformly.
    Otherwise each free gene independently, with probability ``p_layer``,
    moves to a uniformly chosen *different* choice. Pinned layers never move.
    """
    for name, p in (("p_layer", p_layer), ("p_resample", p_resample)):
        if not 0.0 <= p <= 1.0:
            raise ConfigError(f"{name} must lie in [0, 1], got {p}")
    if rng.random() < p_resample:
        return random_chromosome(rng, pinned)
    pins = pinned or {}
    genes = list(m)
    flips = rng.random(NUM_LAYERS) < p_layer
    # offset in 1..11 guarantees a different index
    offsets = rng.integers(1, NUM_CHOICES, size=NUM_LAYERS)
    for layer in range(NUM_LAYERS):
        if flips[layer] and layer not in pins:
            genes[layer] = (genes[layer] + int(offsets[layer])) % NUM_CHOICES
    return tuple(genes)
