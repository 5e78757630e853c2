"""Exact hypervolume for up to three minimization objectives."""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from typing import Sequence

import numpy as np

from ..errors import DomainError


def _hv2d(xy: np.ndarray, ref: np.ndarray) -> float:
    order = np.lexsort((xy[:, 1], xy[:, 0]))
    x = xy[order, 0]
    best_y = np.minimum.accumulate(xy[order, 1])
    widths = np.diff(np.append(x, ref[0]))
    return float(np.sum(widths * (ref[1] - best_y)))


class _Staircase:
    """2-D non-dominated set with its dominated area, updated point by point.

    ``xs`` ascends and ``ys`` strictly descends.
    """

    def __init__(self, rx: float, ry: float):
        self.rx, self.ry = rx, ry
        self.xs: list[float] = []
        self.ys: list[float] = []
        self.area = 0.0

    def add(self, x: float, y: float) -> None:
        xs, ys = self.xs, self.ys
        j = bisect_right(xs, x) - 1
        level = ys[j] if j >= 0 else self.ry
        if level <= y:
            return  # weakly dominated
        k = bisect_left(xs, x)
        m = k
        left = x
        gained = 0.0
        while m < len(xs) and ys[m] >= y:
            gained += (xs[m] - left) * (level - y)
            left, level = xs[m], ys[m]
            m += 1
        right = xs[m] if m < len(xs) else self.rx
        gained += (right - left) * (level - y)
        del xs[k:m], ys[k:m]
        xs.insert(k, x)
        ys.insert(k, y)
        self.area += gained


def _hv3d(pts: np.ndarray, ref: np.ndarray) -> float:
    order = np.lexsort((pts[:, 1], pts[:, 0], pts[:, 2]))
    pts = pts[order]
    stairs = _Staircase(float(ref[0]), float(ref[1]))
    z = np.append(pts[:, 2], ref[2])
    total = 0.0
    for i, (x, y, _) in enumerate(pts.tolist()):
        stairs.add(x, y)
        depth = z[i + 1] - z[i]
        if depth > 0:
            total += stairs.area * depth
    return float(total)


def hypervolume(front: Sequence[Sequence[float]], ref: Sequence[float]) -> float:
    """Measure of the union of boxes ``[p, ref]`` over the points of ``front``.

    Dominated and duplicate points are allowed and change nothing. Every
    point must be coordinate-wise <= ``ref``.
    """
    ref = np.asarray(ref, dtype=np.float64)
    pts = np.asarray(front, dtype=np.float64)
    if pts.size == 0:
        return 0.0
    pts = pts.reshape(-1, ref.size)
    bad = np.flatnonzero((pts > ref).any(axis=1))
    if bad.size:
        raise DomainError(f"point {pts[bad[0]].tolist()} does not dominate reference {ref.tolist()}")

    d = ref.size
    if d == 1:
        return float(ref[0] - pts[:, 0].min())
    if d == 2:
        return _hv2d(pts, ref)
    if d == 3:
        return _hv3d(pts, ref)
    raise DomainError(f"hypervolume supports 1 to 3 objectives, got {d}")


def nondominated_mask(points: np.ndarray) -> np.ndarray:
    """Boolean mask of points not dominated by any other (duplicates all kept)."""
    P = np.asarray(points, dtype=np.float64)
    if len(P) == 0:
        return np.zeros(0, dtype=bool)
    le = (P[:, None, :] <= P[None, :, :]).all(axis=-1)
    lt = (P[:, None, :] < P[None, :, :]).any(axis=-1)
    return ~(le & lt).any(axis=0)
