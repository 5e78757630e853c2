"""Accuracy evaluators.

The search engine only needs something with ``evaluate(chromosome) -> float``
returning a score in [0, 1]. Two implementations ship here: a lookup into a
pre-computed table, and a closed-form synthetic benchmark for desk-scale runs.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Mapping, Protocol, Sequence, runtime_checkable

from .errors import AccuracyLookupError, ChromosomeParseError, ConfigError, DomainError
from .search_space import CHOICES, NUM_LAYERS, format_chromosome, parse_chromosome, validate_chromosome


@runtime_checkable
class Evaluator(Protocol):
    def evaluate(self, m: Sequence[int]) -> float: ...


def _check_score(value: float, where: str) -> float:
    value = float(value)
    if not (0.0 <= value <= 1.0) or math.isnan(value):
        raise DomainError(f"{where}: accuracy {value} outside [0, 1]")
    return value


class TableEvaluator:
    """Exact lookup of chromosome scores.

    Args:
        scores: mapping from chromosome (tuple or text form) to accuracy.
        default: ``None`` for the strict policy (misses raise
            :class:`AccuracyLookupError`), otherwise the score returned on a miss.
    """

    def __init__(self, scores: Mapping, default: float | None = None):
        table = {}
        for key, value in scores.items():
            m = parse_chromosome(key) if isinstance(key, str) else validate_chromosome(key)
            table[m] = _check_score(value, format_chromosome(m))
        self._scores = table
        self.default = None if default is None else _check_score(default, "default policy")

    def __len__(self) -> int:
        return len(self._scores)

    def evaluate(self, m: Sequence[int]) -> float:
        key = tuple(int(g) for g in m)
        try:
            return self._scores[key]
        except KeyError:
            if self.default is None:
                raise AccuracyLookupError(key) from None
            return self.default

    @classmethod
    def from_csv(cls, path: str | Path, default: float | None = None) -> TableEvaluator:
        """Read ``chromosome_text,score`` lines.

        The chromosome text itself contains commas, so the score is the last
        field and the 14 fields before it are the genes.
        """
        scores = {}
        try:
            with open(path, newline="", encoding="utf-8") as fh:
                for lineno, row in enumerate(csv.reader(fh), start=1):
                    if not row or not "".join(row).strip():
                        continue
                    if lineno == 1 and row[-1].strip().lower() in ("score", "accuracy"):
                        continue
                    try:
                        m = parse_chromosome(",".join(row[:-1]).strip('"'))
                        scores[m] = _check_score(float(row[-1]), f"{path}:{lineno}")
                    except (ChromosomeParseError, ValueError) as exc:
                        raise ConfigError(f"{path}:{lineno}: {exc}") from None
        except OSError as exc:
            raise ConfigError(f"cannot read accuracy table {path}: {exc.strerror or exc}") from None
        return cls(scores, default)


# Synthetic benchmark ------------------------------------------------------

def gene_quality(choice_index: int) -> float:
    """Per-gene quality in [0, 1]: 0.5 for expansion 6, up to 0.15 for kernel 7, 0.35 for SE."""
    c = CHOICES[choice_index]
    return 0.5 * (c.expansion == 6) + 0.15 * (c.kernel - 3) / 4 + 0.35 * c.se


POSITION_WEIGHTS = (1,) * 7 + (2,) * 7


class SyntheticEvaluator:
    """Closed-form surrogate accuracy in [0.50, 0.80].

    Later layers count double, and every feature that adds capacity also adds
    quality, so accuracy pulls against latency the way a real network would.
    """

    floor = 0.50
    span = 0.30

    def __init__(self):
        self._quality = tuple(gene_quality(i) for i in range(len(CHOICES)))
        self._total_weight = sum(POSITION_WEIGHTS)

    def evaluate(self, m: Sequence[int]) -> float:
        if len(m) != NUM_LAYERS:
            raise DomainError(f"expected {NUM_LAYERS} genes, found {len(m)}")
        acc = 0.0
        for w, g in zip(POSITION_WEIGHTS, m):
            acc += w * self._quality[g]
        return self.floor + self.span * acc / self._total_weight


def synthetic_evaluate(m: Sequence[int]) -> float:
    return _SYNTHETIC.evaluate(m)


def table_evaluate(db: Mapping, m: Sequence[int], default: float | None = None) -> float:
    return TableEvaluator(db, default).evaluate(m)


_SYNTHETIC = SyntheticEvaluator()
