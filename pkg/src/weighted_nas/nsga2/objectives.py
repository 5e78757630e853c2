"""Objective vectors, preference weights and Pareto dominance."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from ..errors import ConfigError, ContractViolation
from ..search_space import Chromosome

OBJECTIVE_NAMES = ("accuracy", "latency_ms", "params")


@dataclass(frozen=True)
class ObjectiveVector:
    accuracy: float
    latency_ms: float
    params: int

    def canonical(self) -> tuple[float, float, float]:
        return canonicalize(self)


def canonicalize(o: ObjectiveVector) -> tuple[float, float, float]:
    """Minimization form: maximize accuracy and params, minimize latency."""
    return (-o.accuracy, o.latency_ms, -o.params)


@dataclass(frozen=True)
class ObjectiveWeights:
    acc: float = 0.4
    lat: float = 0.4
    params: float = 0.2

    def __post_init__(self):
        values = self.as_tuple()
        if any(not math.isfinite(w) or w < 0 for w in values):
            raise ConfigError(f"weights must be non-negative, got {values}")
        if abs(sum(values) - 1.0) > 1e-9:
            raise ConfigError(f"weights must sum to 1, got {sum(values):.12g} from {values}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.acc, self.lat, self.params)


EQUAL_WEIGHTS = ObjectiveWeights(1 / 3, 1 / 3, 1 / 3)


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """Pareto dominance for minimization: no worse everywhere, not identical."""
    if len(a) != len(b):
        raise ValueError(f"arity mismatch: {len(a)} vs {len(b)}")
    strictly_better = False
    for x, y in zip(a, b):
        if x > y:
            return False
        if x < y:
            strictly_better = True
    return strictly_better


@dataclass(eq=False)
class Individual:
    chromosome: Chromosome
    objectives: ObjectiveVector
    violation: float = 0.0  # amount over the latency cap; 0 when feasible
    feasible: bool = True
    rank: int | None = field(default=None, compare=False)
    crowding: float | None = field(default=None, compare=False)

    def canonical(self, n_objectives: int = 3) -> tuple[float, ...]:
        return canonicalize(self.objectives)[:n_objectives]

    def sort_key(self) -> tuple:
        """Key under which smaller means preferred by the crowded comparison."""
        if self.rank is None or self.crowding is None:
            raise ContractViolation(
                f"rank/crowding unset for chromosome {','.join(map(str, self.chromosome))}"
            )
        return (self.rank, -self.crowding, self.chromosome)
