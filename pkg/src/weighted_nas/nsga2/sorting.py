"""Fast non-dominated sorting, weighted crowding distance, crowded comparison."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .objectives import Individual, ObjectiveWeights


def domination_matrix(
    objectives: np.ndarray,
    feasible: np.ndarray | None = None,
    violation: np.ndarray | None = None,
) -> np.ndarray:
    """``D[i, j]`` is true when individual i dominates individual j.

    With ``feasible`` given, constrained domination applies: any feasible
    point dominates any infeasible one, and among infeasible points the
    smaller violation wins.
    """
    F = np.asarray(objectives, dtype=np.float64)
    le = (F[:, None, :] <= F[None, :, :]).all(axis=-1)
    lt = (F[:, None, :] < F[None, :, :]).any(axis=-1)
    D = le & lt
    if feasible is None or feasible.all():
        return D
    feas = np.asarray(feasible, dtype=bool)
    viol = np.zeros(len(F)) if violation is None else np.asarray(violation, dtype=np.float64)
    both_feasible = feas[:, None] & feas[None, :]
    both_infeasible = ~feas[:, None] & ~feas[None, :]
    return (
        (both_feasible & D)
        | (feas[:, None] & ~feas[None, :])
        | (both_infeasible & (viol[:, None] < viol[None, :]))
    )


def nondominated_fronts(
    objectives: np.ndarray,
    feasible: np.ndarray | None = None,
    violation: np.ndarray | None = None,
) -> list[list[int]]:
    """Partition row indices into fronts F0, F1, ... (Deb's counting scheme)."""
    n = len(objectives)
    if n == 0:
        return []
    D = domination_matrix(objectives, feasible, violation)
    dominated_by = D.sum(axis=0)
    assigned = np.zeros(n, dtype=bool)
    fronts = []
    current = np.flatnonzero(dominated_by == 0)
    while current.size:
        fronts.append(current.tolist())
        assigned[current] = True
        dominated_by = dominated_by - D[current].sum(axis=0)
        current = np.flatnonzero((dominated_by == 0) & ~assigned)
    return fronts


def crowding_distances(objectives: np.ndarray, weights: Sequence[float]) -> np.ndarray:
    """Weighted crowding distance of every point of one front.

    Interior points accumulate ``w_k * (next - prev) / (max - min)`` per
    objective k; the extremes of each weighted objective get infinity.
    Objectives with zero weight are skipped entirely, and a zero range
    contributes nothing to interior points.
    """
    F = np.asarray(objectives, dtype=np.float64)
    n, d = F.shape
    if len(weights) != d:
        raise ValueError(f"{len(weights)} weights for {d} objectives")
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = np.inf
        return dist
    for k in range(d):
        w = float(weights[k])
        if w == 0.0:
            continue
        order = np.argsort(F[:, k], kind="stable")
        vals = F[order, k]
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        span = vals[-1] - vals[0]
        if span == 0:
            continue
        dist[order[1:-1]] += w * (vals[2:] - vals[:-2]) / span
    return dist


def _arrays(pop: Sequence[Individual], n_objectives: int):
    F = np.array([ind.canonical(n_objectives) for ind in pop], dtype=np.float64).reshape(
        len(pop), n_objectives
    )
    feasible = np.array([ind.feasible for ind in pop], dtype=bool)
    violation = np.array([ind.violation for ind in pop], dtype=np.float64)
    return F, feasible, violation


def fast_nondominated_sort(
    pop: Sequence[Individual], n_objectives: int = 3
) -> list[list[Individual]]:
    """Sort a population into fronts and set each individual's ``rank``."""
    F, feasible, violation = _arrays(pop, n_objectives)
    fronts = []
    for rank, idx in enumerate(nondominated_fronts(F, feasible, violation)):
        front = [pop[i] for i in idx]
        for ind in front:
            ind.rank = rank
        fronts.append(front)
    return fronts


def weighted_crowding(
    front: Sequence[Individual], weights: ObjectiveWeights, n_objectives: int = 3
) -> list[float]:
    """Set and return the crowding distance of each member of ``front``."""
    if not front:
        return []
    F, _, _ = _arrays(front, n_objectives)
    dist = crowding_distances(F, weights.as_tuple()[:n_objectives])
    for ind, d in zip(front, dist):
        ind.crowding = float(d)
    return dist.tolist()


def crowded_compare(a: Individual, b: Individual) -> int:
    """-1 if ``a`` is preferred, 1 if ``b`` is, 0 only for the same chromosome at equal standing."""
    ka, kb = a.sort_key(), b.sort_key()
    return -1 if ka < kb else (1 if kb < ka else 0)


def rank_and_crowd(
    pop: Sequence[Individual], weights: ObjectiveWeights, n_objectives: int = 3
) -> list[list[Individual]]:
    fronts = fast_nondominated_sort(pop, n_objectives)
    for front in fronts:
        weighted_crowding(front, weights, n_objectives)
    return fronts
