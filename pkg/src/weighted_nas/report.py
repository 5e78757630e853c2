"""Run artifacts: architecture tables, front/population CSVs, generation logs,
and the plot-data files derived from a finished run."""

from __future__ import annotations

import csv
import io
import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

from .errors import ChromosomeParseError, RunArtifactError
from .nsga2 import Individual, SearchResult
from .search_space import (
    NUM_LAYERS,
    ArchitectureSpec,
    BlockChoice,
    Chromosome,
    format_chromosome,
    index_of_choice,
)

ARCH_COLUMNS = ("Input", "Ops", "t", "c", "SE", "NL", "s")
CHECK = "✓"

FRONT_FILE = "front.csv"
POPULATION_FILE = "population.csv"
LOG_FILE = "generations.jsonl"
SELECTED_FILE = "selected.md"
REPORT_FILE = "report.json"

HISTOGRAM_BIN = 250_000


# ---------------------------------------------------------------------------
# Architecture tables
# ---------------------------------------------------------------------------


def _shape(res: int, channels: int) -> str:
    return f"{res}²×{channels}"


def architecture_rows(arch: ArchitectureSpec) -> list[tuple[str, ...]]:
    """One row per layer, stem and tail included, in the classic mobile-net layout."""
    conv, first = arch.stem
    rows = [
        (_shape(conv.in_resolution, conv.in_channels), "conv2d, 3×3", "-", str(conv.out_channels), "-", "HS", "2"),
        (_shape(first.in_resolution, first.in_channels), "bneck, 3×3", "1", str(first.out_channels), "-", "RE", "1"),
    ]
    for b in arch.blocks:
        rows.append((
            _shape(b.in_resolution, b.in_channels),
            f"bneck, {b.kernel}×{b.kernel}",
            str(b.expansion),
            str(b.out_channels),
            CHECK if b.se else "-",
            b.nonlinearity,
            str(b.stride),
        ))
    head, feat, cls = arch.head, arch.feature, arch.classifier
    pool = head.out_resolution
    rows += [
        (_shape(head.in_resolution, head.in_channels), "conv2d, 1×1", "-", str(head.out_channels), "-", "HS", "1"),
        (_shape(pool, head.out_channels), f"avgpool, {pool}×{pool}", "-", "-", "-", "HS", "-"),
        (_shape(1, feat.in_channels), "conv2d, 1×1", "-", str(feat.out_channels), "-", "HS", "1"),
        (_shape(1, cls.in_channels), "conv2d, 1×1", "-", str(cls.out_channels), "-", "-", "-"),
    ]
    return rows


def format_arch_markdown(arch: ArchitectureSpec) -> str:
    lines = [
        "| " + " | ".join(ARCH_COLUMNS) + " |",
        "|" + "---|" * len(ARCH_COLUMNS),
    ]
    lines += ["| " + " | ".join(row) + " |" for row in architecture_rows(arch)]
    return "\n".join(lines) + "\n"


def format_arch_csv(arch: ArchitectureSpec) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ARCH_COLUMNS)
    w.writerows(architecture_rows(arch))
    return buf.getvalue()


_BNECK = re.compile(r"bneck,\s*(\d+)×(\d+)")


def parse_arch_table(text: str) -> Chromosome:
    """Recover the chromosome from a markdown or CSV architecture table."""
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("|"):
            cells = [c.strip() for c in line.strip("|").split("|")]
        else:
            cells = next(csv.reader([line]))
        if len(cells) != len(ARCH_COLUMNS) or cells[0] == "Input" or set(cells[0]) <= set("-: "):
            continue
        rows.append(cells)
    blocks = [r for r in rows if _BNECK.match(r[1])]
    if len(blocks) != NUM_LAYERS + 1:
        raise ChromosomeParseError(f"expected {NUM_LAYERS + 1} bneck rows, found {len(blocks)}")
    genes = []
    for r in blocks[1:]:
        kernel = int(_BNECK.match(r[1]).group(1))
        genes.append(index_of_choice(BlockChoice(int(r[2]), kernel, r[4] == CHECK)))
    return tuple(genes)


# ---------------------------------------------------------------------------
# Run output
# ---------------------------------------------------------------------------


@dataclass
class RunReport:
    config: dict[str, Any]
    log: list[dict[str, Any]]
    front: list[dict[str, Any]]
    selected: list[dict[str, Any]]
    total_evaluations: int
    unique_evaluations: int
    wall_time_s: float = field(default=0.0)

    def as_dict(self) -> dict[str, Any]:
        return {
            "config": self.config,
            "total_evaluations": self.total_evaluations,
            "unique_evaluations": self.unique_evaluations,
            "wall_time_s": self.wall_time_s,
            "generations_logged": len(self.log),
            "front": self.front,
            "selected": self.selected,
        }


def _individual_row(ind: Individual) -> dict[str, Any]:
    o = ind.objectives
    return {
        "chromosome": format_chromosome(ind.chromosome),
        "accuracy": o.accuracy,
        "latency_ms": o.latency_ms,
        "params": o.params,
    }


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def front_csv(front: Sequence[Individual]) -> str:
    rows = [list(_individual_row(i).values()) for i in front]
    return _csv_text(("chromosome", "accuracy", "latency_ms", "params"), rows)


def population_csv(population: Sequence[Individual]) -> str:
    rows = [list(_individual_row(i).values()) + [i.rank, i.crowding] for i in population]
    return _csv_text(("chromosome", "accuracy", "latency_ms", "params", "rank", "crowding"), rows)


def log_jsonl(result: SearchResult) -> str:
    return "".join(json.dumps(r.as_dict()) + "\n" for r in result.log)


def selected_markdown(result: SearchResult, decode) -> str:
    parts = []
    for n, ind in enumerate(result.selected, start=1):
        o = ind.objectives
        parts.append(
            f"## Model {n}: {format_chromosome(ind.chromosome)}\n\n"
            f"accuracy {o.accuracy:.4f}, latency {o.latency_ms:.4f} ms, params {o.params}\n\n"
            + format_arch_markdown(decode(ind.chromosome))
        )
    return "\n".join(parts)


def write_run(result: SearchResult, outdir: str | Path, config: dict[str, Any], wall_time: float, decode) -> RunReport:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    (out / FRONT_FILE).write_text(front_csv(result.front), encoding="utf-8")
    (out / POPULATION_FILE).write_text(population_csv(result.population), encoding="utf-8")
    (out / LOG_FILE).write_text(log_jsonl(result), encoding="utf-8")
    (out / SELECTED_FILE).write_text(selected_markdown(result, decode), encoding="utf-8")
    report = RunReport(
        config=config,
        log=[r.as_dict() for r in result.log],
        front=[_individual_row(i) for i in result.front],
        selected=[_individual_row(i) for i in result.selected],
        total_evaluations=result.total_evaluations,
        unique_evaluations=result.unique_evaluations,
        wall_time_s=wall_time,
    )
    (out / REPORT_FILE).write_text(json.dumps(report.as_dict(), indent=2) + "\n", encoding="utf-8")
    return report


# ---------------------------------------------------------------------------
# Reading runs back
# ---------------------------------------------------------------------------


def _read_rows(path: Path, required: Sequence[str]) -> list[dict[str, str]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            missing = set(required) - set(reader.fieldnames or ())
            if missing:
                raise RunArtifactError(f"{path}: missing columns {sorted(missing)}")
            return list(reader)
    except OSError as exc:
        raise RunArtifactError(f"{path}: {exc.strerror or exc}") from None


def read_front(run_dir: str | Path) -> list[dict[str, Any]]:
    path = Path(run_dir) / FRONT_FILE
    rows = _read_rows(path, ("chromosome", "accuracy", "latency_ms", "params"))
    out = []
    for n, r in enumerate(rows, start=2):
        try:
            out.append({
                "chromosome": r["chromosome"],
                "accuracy": float(r["accuracy"]),
                "latency_ms": float(r["latency_ms"]),
                "params": int(r["params"]),
            })
        except (TypeError, ValueError):
            raise RunArtifactError(f"{path}:{n}: malformed row") from None
    return out


def read_population_params(run_dir: str | Path) -> list[int]:
    path = Path(run_dir) / POPULATION_FILE
    rows = _read_rows(path, ("params",))
    try:
        return [int(r["params"]) for r in rows]
    except (TypeError, ValueError):
        raise RunArtifactError(f"{path}: malformed params column") from None


def read_log(run_dir: str | Path) -> list[dict[str, Any]]:
    path = Path(run_dir) / LOG_FILE
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise RunArtifactError(f"{path}: {exc.strerror or exc}") from None
    records = []
    for n, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            records.append({"generation": int(rec["generation"]), "hypervolume": float(rec["hypervolume"])})
        except (ValueError, KeyError, TypeError):
            raise RunArtifactError(f"{path}:{n}: malformed generation record") from None
    return records


def params_histogram(params: Sequence[int], width: int = HISTOGRAM_BIN) -> list[tuple[float, float, int]]:
    """Bins anchored at zero so histograms from different runs line up."""
    if not params:
        return []
    counts = Counter(p // width for p in params)
    lo, hi = min(counts), max(counts)
    return [(b * width / 1e6, (b + 1) * width / 1e6, counts.get(b, 0)) for b in range(lo, hi + 1)]


def pareto_report(run_dir: str | Path, outdir: str | Path | None = None) -> list[Path]:
    run = Path(run_dir)
    if not run.is_dir() or not any((run / f).exists() for f in (FRONT_FILE, POPULATION_FILE, LOG_FILE)):
        raise RunArtifactError(f"no run artifacts found in {run}")
    front = read_front(run)
    log = read_log(run)
    params = read_population_params(run)

    out = Path(outdir) if outdir is not None else run
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "front_scatter.csv": _csv_text(
            ("chromosome", "latency_ms", "accuracy", "params"),
            [(r["chromosome"], r["latency_ms"], r["accuracy"], r["params"]) for r in front],
        ),
        "hypervolume.csv": _csv_text(
            ("generation", "hypervolume"), [(r["generation"], r["hypervolume"]) for r in log]
        ),
        "params_histogram.csv": _csv_text(
            ("bin_start_m", "bin_end_m", "count"), params_histogram(params)
        ),
    }
    written = []
    for name, text in files.items():
        (out / name).write_text(text, encoding="utf-8")
        written.append(out / name)
    return written


def mean_params(run_dir: str | Path) -> float:
    params = read_population_params(run_dir)
    if not params:
        raise RunArtifactError(f"{run_dir}: population is empty")
    return math.fsum(params) / len(params)
