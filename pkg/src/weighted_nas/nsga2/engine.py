"""The weighted NSGA-II search loop.

Each generation merges parents and offspring, sorts them into fronts, keeps
the best ``n`` by rank and weighted crowding, and breeds ``n`` new offspring.
Every random decision draws from a stream keyed on ``(seed, generation,
slot)``, so results do not depend on how evaluations are scheduled.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from ..errors import ConfigError, DomainError, EvaluationError
from ..evaluator import Evaluator
from ..latency import LatencyTable, predict_latency
from ..model_stats import count_params, param_range
from ..search_space import (
    NUM_CHOICES,
    Chromosome,
    _check_pinned,
    decode_architecture,
    diversity_init,
    free_layers,
)
from .hypervolume import hypervolume
from .objectives import Individual, ObjectiveVector, ObjectiveWeights
from .operators import hierarchical_mutation, single_point_crossover, tournament_select
from .sorting import fast_nondominated_sort, rank_and_crowd, weighted_crowding

log = logging.getLogger(__name__)

HV_REFERENCE = 1.1  # per normalized objective
MAX_VARIATION_ATTEMPTS = 20


@dataclass(frozen=True)
class SearchConfig:
    population_size: int = 70
    generations: int = 120
    weights: ObjectiveWeights = field(default_factory=ObjectiveWeights)
    seed: int = 0
    crossover_prob: float = 0.9
    p_layer: float = 0.1
    p_resample: float = 0.2
    k: int = 3
    latency_cap_ms: float | None = None
    objectives: int = 3  # 2 drops params from dominance (accuracy vs latency only)
    num_classes: int = 1000
    pinned: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        n = self.population_size
        if n < NUM_CHOICES or n % 2:
            raise ConfigError(f"population_size must be even and >= {NUM_CHOICES}, got {n}")
        if self.generations < 1:
            raise ConfigError(f"generations must be >= 1, got {self.generations}")
        if not 1 <= self.k <= n:
            raise ConfigError(f"K must lie in 1..population_size, got {self.k}")
        for name in ("crossover_prob", "p_layer", "p_resample"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {p}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a non-negative 64-bit integer, got {self.seed}")
        if self.objectives not in (2, 3):
            raise ConfigError(f"objectives must be 2 or 3, got {self.objectives}")
        if self.objectives == 2 and self.weights.params != 0:
            raise ConfigError("weights: the 2-objective mode requires weights.params = 0")
        if self.latency_cap_ms is not None and not self.latency_cap_ms > 0:
            raise ConfigError(f"latency_cap_ms must be positive, got {self.latency_cap_ms}")
        if self.num_classes < 1:
            raise ConfigError(f"num_classes must be positive, got {self.num_classes}")
        object.__setattr__(self, "pinned", _check_pinned(self.pinned))
        if len(free_layers(self.pinned)) == 0:
            raise ConfigError("pinned: every layer is pinned")

    def two_objective(self) -> SearchConfig:
        """Same run without the params objective; accuracy/latency weights renormalized."""
        w = self.weights
        total = w.acc + w.lat
        return replace(self, objectives=2, weights=ObjectiveWeights(w.acc / total, w.lat / total, 0.0))


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    f0_size: int
    best_accuracy: float
    min_latency_ms: float
    hypervolume: float
    evaluations: int

    def as_dict(self) -> dict:
        return {
            "generation": self.generation,
            "f0_size": self.f0_size,
            "best_accuracy": self.best_accuracy,
            "min_latency_ms": self.min_latency_ms,
            "hypervolume": self.hypervolume,
            "evaluations": self.evaluations,
        }


@dataclass
class SearchResult:
    config: SearchConfig
    population: list[Individual]
    front: list[Individual]
    selected: list[Individual]
    archive: list[Individual]
    log: list[GenerationRecord]
    unique_evaluations: int
    history: list[list[Individual]] | None = None  # P_0..P_N when requested

    @property
    def total_evaluations(self) -> int:
        return len(self.archive)


def stream(seed: int, generation: int, slot: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(generation, slot)))


def select_k_equal_distance(front: Sequence[Individual], k: int) -> list[Individual]:
    """K members spread evenly along the front's latency axis.

    ``k == 1`` returns the most accurate member instead.
    """
    if not front:
        raise DomainError("cannot select from an empty front")
    if k < 1:
        raise DomainError(f"K must be >= 1, got {k}")
    if k == 1:
        best = min(front, key=lambda i: (-i.objectives.accuracy, i.objectives.latency_ms, i.chromosome))
        return [best]
    ordered = sorted(
        front,
        key=lambda i: (i.objectives.latency_ms, -i.objectives.accuracy, -i.objectives.params, i.chromosome),
    )
    picks = []
    for j in range(k):
        idx = j * (len(ordered) - 1) // (k - 1)
        if not picks or picks[-1] != idx:
            picks.append(idx)
    return [ordered[i] for i in picks]


class _Problem:
    """Objective evaluation with a per-run cache keyed by chromosome."""

    def __init__(self, cfg: SearchConfig, evaluator: Evaluator, lut: LatencyTable, workers: int):
        self.cfg = cfg
        self.evaluator = evaluator
        self.lut = lut
        self.workers = max(1, int(workers))
        self.cache: dict[Chromosome, ObjectiveVector] = {}

        lat_lo, lat_hi = lut.bounds()
        p_lo, p_hi = param_range(cfg.num_classes)
        # canonical (-acc, lat, -params) mapped so the ideal corner is 0 and the nadir 1
        self._lo = np.array([-1.0, lat_lo, -p_hi], dtype=np.float64)
        span = np.array([1.0, lat_hi - lat_lo, p_hi - p_lo], dtype=np.float64)
        self._span = np.where(span > 0, span, 1.0)

    def _objectives(self, m: Chromosome) -> ObjectiveVector:
        try:
            acc = float(self.evaluator.evaluate(m))
        except Exception as exc:
            raise EvaluationError(m, exc) from exc
        if not 0.0 <= acc <= 1.0:
            raise EvaluationError(m, ValueError(f"accuracy {acc} outside [0, 1]"))
        lat = predict_latency(self.lut, m)
        params = count_params(decode_architecture(m, self.cfg.num_classes))
        return ObjectiveVector(acc, lat, params)

    def evaluate(self, chromosomes: Sequence[Chromosome]) -> list[ObjectiveVector]:
        todo = list(dict.fromkeys(m for m in chromosomes if m not in self.cache))
        if self.workers > 1 and len(todo) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                results = list(pool.map(self._objectives, todo))
        else:
            results = [self._objectives(m) for m in todo]
        self.cache.update(zip(todo, results))
        return [self.cache[m] for m in chromosomes]

    def individuals(self, chromosomes: Sequence[Chromosome]) -> list[Individual]:
        cap = self.cfg.latency_cap_ms
        out = []
        for m, obj in zip(chromosomes, self.evaluate(chromosomes)):
            if cap is None:
                out.append(Individual(m, obj))
            else:
                out.append(Individual(m, obj, max(0.0, obj.latency_ms - cap), obj.latency_ms < cap))
        return out

    def normalized(self, objs: Sequence[ObjectiveVector]) -> np.ndarray:
        d = self.cfg.objectives
        F = np.array([(-o.accuracy, o.latency_ms, -o.params) for o in objs], dtype=np.float64)
        return ((F - self._lo) / self._span)[:, :d]


def _survivors(R: list[Individual], cfg: SearchConfig) -> list[Individual]:
    n, d = cfg.population_size, cfg.objectives
    chosen: list[Individual] = []
    for front in fast_nondominated_sort(R, d):
        weighted_crowding(front, cfg.weights, d)
        if len(chosen) + len(front) <= n:
            chosen.extend(front)
        else:
            front.sort(key=Individual.sort_key)
            chosen.extend(front[: n - len(chosen)])
        if len(chosen) == n:
            break
    return chosen


def _vary(P: list[Individual], cfg: SearchConfig, rng: np.random.Generator, slot: int) -> list[Chromosome]:
    a, b = tournament_select(P, rng)
    if slot % 2 == 0:
        return list(single_point_crossover(a.chromosome, b.chromosome, rng, cfg.crossover_prob))
    return [
        hierarchical_mutation(parent.chromosome, rng, cfg.p_layer, cfg.p_resample, cfg.pinned)
        for parent in (a, b)
    ]


def _offspring(P: list[Individual], cfg: SearchConfig, generation: int) -> list[Chromosome]:
    """Even slots produce a crossover pair, odd slots two mutants.

    A slot whose children already exist in the parents or earlier offspring
    is re-run (same stream, up to ``MAX_VARIATION_ATTEMPTS`` times) so that
    population slots are not wasted on copies.
    """
    seen = {ind.chromosome for ind in P}
    children: list[Chromosome] = []
    for slot in range(cfg.population_size // 2):
        rng = stream(cfg.seed, generation, slot)
        for _ in range(MAX_VARIATION_ATTEMPTS):
            pair = _vary(P, cfg, rng, slot)
            if pair[0] != pair[1] and not seen.intersection(pair):
                break
        seen.update(pair)
        children.extend(pair)
    return children


def evolve(
    cfg: SearchConfig,
    evaluator: Evaluator,
    lut: LatencyTable,
    *,
    workers: int = 1,
    on_generation: Callable[[GenerationRecord], None] | None = None,
    keep_history: bool = False,
) -> SearchResult:
    """Run the full pipeline and return the final population, its front and the archive.

    The archive holds every evaluated individual in evaluation order
    (``2n + N*n`` entries). ``workers`` only changes how objective
    evaluations are scheduled, never the result.
    """
    problem = _Problem(cfg, evaluator, lut, workers)
    n, d = cfg.population_size, cfg.objectives
    archive: list[Individual] = []
    records: list[GenerationRecord] = []
    seen_points: list[np.ndarray] = []

    def record(generation: int, P: list[Individual], batch: list[Individual]) -> None:
        archive.extend(replace(ind, rank=None, crowding=None) for ind in batch)
        feasible = [ind.objectives for ind in batch if ind.feasible]
        if feasible:
            seen_points.append(problem.normalized(feasible))
        hv = hypervolume(np.vstack(seen_points), [HV_REFERENCE] * d) if seen_points else 0.0
        f0 = fast_nondominated_sort([replace(ind) for ind in P], d)[0]
        rec = GenerationRecord(
            generation,
            len(f0),
            max(i.objectives.accuracy for i in f0),
            min(i.objectives.latency_ms for i in f0),
            hv,
            len(archive),
        )
        records.append(rec)
        log.debug("generation %d: %s", generation, rec)
        if on_generation is not None:
            on_generation(rec)

    P = problem.individuals(diversity_init(n, stream(cfg.seed, 0, 0), cfg.pinned))
    Q = problem.individuals(diversity_init(n, stream(cfg.seed, 0, 1), cfg.pinned))
    record(0, P, P + Q)
    history = [[replace(i) for i in P]] if keep_history else None

    for g in range(1, cfg.generations + 1):
        P = _survivors(P + Q, cfg)
        Q = problem.individuals(_offspring(P, cfg, g))
        record(g, P, Q)
        if history is not None:
            history.append([replace(i) for i in P])

    P = [replace(ind, rank=None, crowding=None) for ind in P]
    fronts = rank_and_crowd(P, cfg.weights, d)
    front = sorted(fronts[0], key=Individual.sort_key)
    return SearchResult(
        config=cfg,
        population=sorted(P, key=Individual.sort_key),
        front=front,
        selected=select_k_equal_distance(front, cfg.k),
        archive=archive,
        log=records,
        unique_evaluations=len(problem.cache),
        history=history,
    )
