"""TOML run configuration.

Example::

    population_size = 70
    generations = 120
    seed = 0
    K = 3
    evaluator = "synthetic"      # or "table"
    lut = "gpu_lut.csv"          # omitted: built-in synthetic table
    # accuracy_table = "acc.csv"
    # accuracy_default = 0.0     # omitted: strict lookups
    # latency_cap_ms = 11.0
    # objectives = 2             # accuracy + latency only

    [weights]
    acc = 0.4
    lat = 0.4
    params = 0.2

    [pinned]                     # 1-based layer = fixed choice
    # 14 = 0

Relative paths resolve against the config file's directory.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .evaluator import Evaluator, SyntheticEvaluator, TableEvaluator
from .latency import LatencyTable, load_table, synthetic_table
from .nsga2 import ObjectiveWeights, SearchConfig

_SEARCH_KEYS = {
    "population_size": int,
    "generations": int,
    "seed": int,
    "crossover_prob": float,
    "p_layer": float,
    "p_resample": float,
    "K": int,
    "latency_cap_ms": float,
    "objectives": int,
    "num_classes": int,
}
_OTHER_KEYS = {"weights", "pinned", "evaluator", "lut", "accuracy_table", "accuracy_default", "workers"}


@dataclass(frozen=True)
class RunSettings:
    search: SearchConfig
    evaluator_kind: str = "synthetic"
    lut_path: Path | None = None
    accuracy_table: Path | None = None
    accuracy_default: float | None = None
    workers: int = 1

    def load_lut(self) -> LatencyTable:
        return synthetic_table() if self.lut_path is None else load_table(self.lut_path)

    def make_evaluator(self) -> Evaluator:
        if self.evaluator_kind == "synthetic":
            return SyntheticEvaluator()
        return TableEvaluator.from_csv(self.accuracy_table, self.accuracy_default)

    def as_dict(self) -> dict[str, Any]:
        s = self.search
        return {
            "population_size": s.population_size,
            "generations": s.generations,
            "seed": s.seed,
            "crossover_prob": s.crossover_prob,
            "p_layer": s.p_layer,
            "p_resample": s.p_resample,
            "K": s.k,
            "latency_cap_ms": s.latency_cap_ms,
            "objectives": s.objectives,
            "num_classes": s.num_classes,
            "weights": {"acc": s.weights.acc, "lat": s.weights.lat, "params": s.weights.params},
            "pinned": {str(layer + 1): g for layer, g in sorted(s.pinned.items())},
            "evaluator": self.evaluator_kind,
            "lut": None if self.lut_path is None else str(self.lut_path),
            "accuracy_table": None if self.accuracy_table is None else str(self.accuracy_table),
            "accuracy_default": self.accuracy_default,
        }


def _typed(source: str, key: str, value: Any, kind: type) -> Any:
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise ConfigError(f"{source}: {key} must be an integer, got {value!r}")
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{source}: {key} must be a number, got {value!r}")
        value = float(value)
    return value


def parse_config(data: dict[str, Any], source: str = "<config>", base: Path | None = None) -> RunSettings:
    base = Path(".") if base is None else base
    unknown = set(data) - set(_SEARCH_KEYS) - _OTHER_KEYS
    if unknown:
        raise ConfigError(f"{source}: unknown keys {sorted(unknown)}")

    kwargs: dict[str, Any] = {}
    for key, kind in _SEARCH_KEYS.items():
        if key in data:
            kwargs["k" if key == "K" else key] = _typed(source, key, data[key], kind)

    raw_w = data.get("weights", {})
    if not isinstance(raw_w, dict) or set(raw_w) - {"acc", "lat", "params"}:
        raise ConfigError(f"{source}: weights must be a table with keys acc, lat, params")
    defaults = ObjectiveWeights()
    try:
        kwargs["weights"] = ObjectiveWeights(
            _typed(source, "weights.acc", raw_w.get("acc", defaults.acc), float),
            _typed(source, "weights.lat", raw_w.get("lat", defaults.lat), float),
            _typed(source, "weights.params", raw_w.get("params", defaults.params), float),
        )
    except ConfigError as exc:
        raise ConfigError(f"{source}: weights: {exc}") from None

    raw_pins = data.get("pinned", {})
    if not isinstance(raw_pins, dict):
        raise ConfigError(f"{source}: pinned must be a table of layer = choice")
    pins = {}
    for layer, choice in raw_pins.items():
        try:
            pins[int(layer) - 1] = int(choice)
        except (TypeError, ValueError):
            raise ConfigError(f"{source}: pinned.{layer} is not an integer layer/choice") from None
    kwargs["pinned"] = pins

    try:
        search = SearchConfig(**kwargs)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None

    kind = data.get("evaluator", "synthetic")
    if kind not in ("synthetic", "table"):
        raise ConfigError(f"{source}: evaluator must be 'synthetic' or 'table', got {kind!r}")
    acc_table = data.get("accuracy_table")
    if kind == "table" and acc_table is None:
        raise ConfigError(f"{source}: evaluator = 'table' requires accuracy_table")
    default = data.get("accuracy_default")
    if default is not None:
        default = _typed(source, "accuracy_default", default, float)
    workers = _typed(source, "workers", data.get("workers", 1), int)
    if workers < 1:
        raise ConfigError(f"{source}: workers must be >= 1")
    lut = data.get("lut")
    return RunSettings(
        search=search,
        evaluator_kind=kind,
        lut_path=None if lut is None else base / lut,
        accuracy_table=None if acc_table is None else base / acc_table,
        accuracy_default=default,
        workers=workers,
    )


def load_config(path: str | Path) -> RunSettings:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_config(data, str(path), path.parent)
