"""Command-line entry point.

Exit codes: 0 success, 1 invalid input, 2 failure during a run.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from .config import load_config
from .errors import LatencyTableError, RuntimeFailure, ValidationError
from .latency import load_table, predict_latency
from .model_stats import model_stats
from .nsga2 import evolve
from .report import format_arch_csv, format_arch_markdown, pareto_report, write_run
from .search_space import decode_architecture, parse_chromosome

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2

log = logging.getLogger("weighted_nas")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def cmd_search(args) -> int:
    settings = load_config(args.config)
    lut = settings.load_lut()
    evaluator = settings.make_evaluator()
    workers = args.workers if args.workers is not None else settings.workers

    def progress(rec):
        log.info(
            "gen %d  |F0|=%d  best_acc=%.4f  min_lat=%.4f  hv=%.6f",
            rec.generation, rec.f0_size, rec.best_accuracy, rec.min_latency_ms, rec.hypervolume,
        )

    start = time.perf_counter()
    result = evolve(settings.search, evaluator, lut, workers=workers, on_generation=progress)
    elapsed = time.perf_counter() - start
    cfg = settings.search
    report = write_run(
        result, args.output, settings.as_dict(), elapsed,
        lambda m: decode_architecture(m, cfg.num_classes),
    )
    print(f"{report.total_evaluations} evaluations ({report.unique_evaluations} unique) in {elapsed:.1f}s")
    print(f"final front: {len(report.front)} models; selected {len(report.selected)}:")
    for row in report.selected:
        print(
            f"  {row['chromosome']}  acc={row['accuracy']:.4f}  "
            f"lat={row['latency_ms']:.4f} ms  params={row['params']}"
        )
    print(f"artifacts written to {args.output}")
    return EXIT_OK


def cmd_stats(args) -> int:
    m = parse_chromosome(args.chromosome)
    stats = model_stats(m, args.classes, args.resolution)
    print(f"params: {stats.param_count} ({stats.params_m:.1f}M)")
    print(f"madds: {stats.madds} ({stats.madds_m:.1f}M)")
    print(f"{stats.params_m:.1f}M params, {stats.madds_m:.0f}M MAdds")
    return EXIT_OK


def cmd_export_arch(args) -> int:
    arch = decode_architecture(parse_chromosome(args.chromosome), args.classes)
    text = format_arch_csv(arch) if args.format == "csv" else format_arch_markdown(arch)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_predict(args) -> int:
    m = parse_chromosome(args.chromosome)
    print(f"{predict_latency(load_table(args.lut), m):.4f} ms")
    return EXIT_OK


def cmd_validate_lut(args) -> int:
    try:
        table = load_table(args.lut)
    except LatencyTableError as exc:
        for problem in exc.problems:
            print(problem, file=sys.stderr)
        print(f"{len(exc.problems)} problem(s) found", file=sys.stderr)
        return EXIT_INVALID
    lo, hi = table.bounds()
    print(f"ok: 168 entries, overhead {table.overhead_ms:.4f} ms, predictions span {lo:.4f}..{hi:.4f} ms")
    return EXIT_OK


def cmd_pareto_report(args) -> int:
    for path in pareto_report(args.run_dir, args.output):
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="weighted-nas", description="Weighted NSGA-II architecture search")
    p.add_argument("-v", "--verbose", action="store_true", help="log every generation")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("search", help="run the evolutionary search")
    s.add_argument("config", type=Path)
    s.add_argument("-o", "--output", type=Path, default=Path("run"))
    s.add_argument("--workers", type=int, default=None, help="parallel evaluation threads")
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("stats", help="parameter and multiply-add counts")
    s.add_argument("chromosome")
    s.add_argument("--classes", type=int, default=1000)
    s.add_argument("--resolution", type=int, default=224)
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("export-arch", help="print the decoded architecture table")
    s.add_argument("chromosome")
    s.add_argument("--classes", type=int, default=1000)
    s.add_argument("--format", choices=("md", "csv"), default="md")
    s.set_defaults(func=cmd_export_arch)

    s = sub.add_parser("predict", help="predict latency from a lookup table")
    s.add_argument("chromosome")
    s.add_argument("--lut", type=Path, required=True)
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("validate-lut", help="check a lookup table and list every problem")
    s.add_argument("lut", type=Path)
    s.set_defaults(func=cmd_validate_lut)

    s = sub.add_parser("pareto-report", help="emit plot data from a finished run")
    s.add_argument("run_dir", type=Path)
    s.add_argument("-o", "--output", type=Path, default=None)
    s.set_defaults(func=cmd_pareto_report)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except RuntimeFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
