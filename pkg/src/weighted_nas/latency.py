"""Layer-wise latency lookup table and additive latency prediction.

File format (CSV, UTF-8)::

    overhead_ms,<float>
    layer1,<12 floats for choices 0..11>
    ...
    layer14,<12 floats>

The overhead term covers the stem, the tail and any fixed framework cost.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DomainError, LatencyTableError
from .model_stats import block_cost_table
from .search_space import CHOICES, NUM_CHOICES, NUM_LAYERS


@dataclass(frozen=True, eq=False)
class LatencyTable:
    entries: np.ndarray  # (14, 12) milliseconds, layer-major
    overhead_ms: float

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.float64)
        problems = _check_values(entries, self.overhead_ms)
        if problems:
            raise LatencyTableError(problems)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "overhead_ms", float(self.overhead_ms))

    def __eq__(self, other):
        if not isinstance(other, LatencyTable):
            return NotImplemented
        return self.overhead_ms == other.overhead_ms and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.overhead_ms, self.entries.tobytes()))

    def scaled(self, factor: float) -> LatencyTable:
        return LatencyTable(self.entries * factor, self.overhead_ms * factor)

    def with_cell(self, layer: int, choice: int, value: float) -> LatencyTable:
        entries = self.entries.copy()
        entries[layer, choice] = value
        return LatencyTable(entries, self.overhead_ms)

    def bounds(self) -> tuple[float, float]:
        """Smallest and largest latency any chromosome can reach."""
        lo = self.overhead_ms + sum(float(v) for v in self.entries.min(axis=1))
        hi = self.overhead_ms + sum(float(v) for v in self.entries.max(axis=1))
        return lo, hi


def _check_values(entries: np.ndarray, overhead: float) -> list[str]:
    problems = []
    if entries.shape != (NUM_LAYERS, NUM_CHOICES):
        return [f"table has shape {entries.shape}, expected ({NUM_LAYERS}, {NUM_CHOICES})"]
    if not math.isfinite(overhead) or overhead < 0:
        problems.append(f"overhead_ms must be finite and >= 0, got {overhead}")
    for i, j in zip(*np.nonzero(~np.isfinite(entries) | (entries < 0))):
        problems.append(f"layer{i + 1} choice {j}: value {entries[i, j]} is negative or not finite")
    return problems


def parse_table(text: str) -> LatencyTable:
    """Parse and validate a LUT document, reporting every violation at once."""
    rows = [r for r in csv.reader(io.StringIO(text)) if any(cell.strip() for cell in r)]
    problems: list[str] = []
    if not rows:
        raise LatencyTableError(["empty document: expected an overhead_ms line and 14 layer rows"])

    overhead = math.nan
    head = rows[0]
    if len(head) != 2 or head[0].strip() != "overhead_ms":
        problems.append(f"line 1: expected 'overhead_ms,<float>', got {','.join(head)!r}")
    else:
        try:
            overhead = float(head[1])
        except ValueError:
            problems.append(f"line 1: overhead_ms value {head[1].strip()!r} is not a number")
        else:
            if not math.isfinite(overhead) or overhead < 0:
                problems.append(f"line 1: overhead_ms must be finite and >= 0, got {head[1].strip()}")

    layer_rows = rows[1:]
    if len(layer_rows) != NUM_LAYERS:
        problems.append(f"expected {NUM_LAYERS} layer rows, found {len(layer_rows)}")

    entries = np.full((NUM_LAYERS, NUM_CHOICES), np.nan)
    for line, row in enumerate(layer_rows, start=2):
        label = row[0].strip()
        expected = f"layer{line - 1}"
        if label != expected:
            problems.append(f"line {line}: expected row label {expected!r}, got {label!r}")
        cells = row[1:]
        if len(cells) != NUM_CHOICES:
            problems.append(
                f"line {line} ({label}): expected {NUM_CHOICES} values, found {len(cells)}"
            )
        for col, cell in enumerate(cells[:NUM_CHOICES]):
            where = f"line {line} ({label}), choice {col}"
            cell = cell.strip()
            if not cell:
                problems.append(f"{where}: missing value")
                continue
            try:
                v = float(cell)
            except ValueError:
                problems.append(f"{where}: {cell!r} is not a number")
                continue
            if not math.isfinite(v):
                problems.append(f"{where}: value {cell} is not finite")
            elif v < 0:
                problems.append(f"{where}: negative value {cell}")
            elif line - 2 < NUM_LAYERS:
                entries[line - 2, col] = v

    if problems:
        raise LatencyTableError(problems)
    return LatencyTable(entries, overhead)


def load_table(path: str | Path) -> LatencyTable:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise LatencyTableError([f"{path}: {exc.strerror or exc}"]) from None
    try:
        return parse_table(text)
    except LatencyTableError as exc:
        raise LatencyTableError([f"{path}: {p}" for p in exc.problems]) from None


def format_table(table: LatencyTable) -> str:
    # repr() round-trips floats exactly
    lines = [f"overhead_ms,{table.overhead_ms!r}"]
    for i, row in enumerate(table.entries, start=1):
        lines.append(f"layer{i}," + ",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def save_table(table: LatencyTable, path: str | Path) -> None:
    Path(path).write_text(format_table(table), encoding="utf-8")


def predict_latency(table: LatencyTable, m: Sequence[int]) -> float:
    """Overhead plus the selected cell of each layer, summed left to right."""
    total = table.overhead_ms
    for layer, g in enumerate(m):
        total += float(table.entries[layer, g])
    return total


def latency_rmse(predicted: Sequence[float], measured: Sequence[float]) -> float:
    p = np.asarray(predicted, dtype=np.float64)
    q = np.asarray(measured, dtype=np.float64)
    if p.ndim != 1 or q.ndim != 1:
        raise DomainError("latency_rmse expects two 1-D sequences")
    if len(p) == 0 or len(p) != len(q):
        raise DomainError(f"need equal nonzero lengths, got {len(p)} and {len(q)}")
    return float(np.sqrt(np.mean((p - q) ** 2)))


def synthetic_table(
    ms_per_madd: float = 0.03e-6, se_ms: float = 0.12, fixed_ms: float = 1.0
) -> LatencyTable:
    """Deterministic stand-in for a measured table.

    Each cell costs time proportional to the block's multiply-adds, plus a
    flat penalty for SE blocks (cheap in MAdds, not in wall time). The
    overhead charges the stem and tail the same way, plus ``fixed_ms``.
    """
    costs = block_cost_table()
    se = np.array([c.se for c in CHOICES], dtype=np.float64)
    entries = costs.madds * ms_per_madd + se_ms * se
    return LatencyTable(entries, costs.fixed_madds * ms_per_madd + fixed_ms)
