"""Comparative benchmark harness: run methods across dataset sizes with
repeats, aggregate population statistics and gap-to-best, and emit CSV/JSON/
markdown reports plus per-run cost-over-time traces.

Statistics are population (not sample) moments: std and var divide by the
run count k, not k - 1. Every report states this in its header.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import methods
from .core import SolveTrace, WaypointSet, build_distance_matrix
from .data import generate_dataset
from .ioutil import atomic_write_text

REPORT_FORMATS = ("csv", "json", "md")

_CSV_COLUMNS = (
    "method", "size", "runs",
    "mean_len_m", "min_len_m", "std_len_m", "var_len_m", "gap_pct",
    "mean_elapsed_ms", "std_elapsed_ms", "var_elapsed_ms",
)


@dataclass(frozen=True)
class SuiteConfig:
    methods: tuple[str, ...]
    sizes: tuple[int, ...]
    repeats: int = 10
    rng_seed: int = 42
    time_budget_ms: Optional[float] = None
    max_iters: Optional[int] = None
    out_dir: Optional[str] = None

    def __post_init__(self):
        if not self.methods:
            raise ValueError("at least one method required")
        if not self.sizes or any(s < 2 for s in self.sizes):
            raise ValueError("sizes must be >= 2")
        if self.repeats < 1:
            raise ValueError(f"repeats must be >= 1, got {self.repeats}")
        for m in self.methods:
            methods.parse_method(m)  # raises UnknownMethodError early


@dataclass(frozen=True)
class RunRecord:
    """One solver execution inside a suite."""

    method: str
    size: int
    seed: int
    tour_len_m: Optional[float]
    elapsed_ms: float
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class ReportRow:
    method: str
    size: int
    runs: int
    mean_len_m: float
    min_len_m: float
    std_len_m: float
    var_len_m: float
    gap_pct: float
    mean_elapsed_ms: float
    std_elapsed_ms: float
    var_elapsed_ms: float


@dataclass
class SuiteReport:
    rows: list[ReportRow] = field(default_factory=list)
    failures: list[RunRecord] = field(default_factory=list)
    statistics: str = "population"


def population_stats(values: list[float]) -> tuple[float, float, float]:
    """(mean, std, var) with the population convention (divide by k)."""
    if not values:
        raise ValueError("no values")
    k = len(values)
    mean = math.fsum(values) / k
    var = math.fsum((v - mean) ** 2 for v in values) / k
    return mean, math.sqrt(var), var


def smooth_trace(trace: SolveTrace, window: int) -> SolveTrace:
    """Running mean of the cost samples over a trailing window; timestamps
    are kept as-is. window=1 is the identity."""
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    out = SolveTrace()
    costs = []
    for elapsed_ms, cost in trace.samples:
        costs.append(cost)
        tail = costs[-window:]
        out.samples.append((elapsed_ms, math.fsum(tail) / len(tail)))
    return out


def run_suite(
    config: SuiteConfig,
    dataset_provider: Optional[Callable[[int], WaypointSet]] = None,
) -> SuiteReport:
    """Execute the full method x size cross-product and aggregate.

    Per size, one waypoint set is shared by every method. Stochastic methods
    run `repeats` times with seeds base+0 .. base+repeats-1; deterministic
    methods run once. Failed runs are recorded in the report, not raised.
    """
    if dataset_provider is None:
        dataset_provider = lambda size: generate_dataset(size, rng_seed=config.rng_seed + size)

    runs: list[RunRecord] = []
    for size in config.sizes:
        points = dataset_provider(size)
        if len(points) != size:
            raise ValueError(f"dataset provider returned {len(points)} points for size {size}")
        matrix = build_distance_matrix(points)
        for method in config.methods:
            repeats = config.repeats if methods.is_stochastic(method) else 1
            for k in range(repeats):
                seed = config.rng_seed + k
                try:
                    result = methods.solve(
                        matrix, method, seed=seed,
                        time_budget_ms=config.time_budget_ms,
                        max_iters=config.max_iters,
                    )
                except Exception as exc:
                    runs.append(RunRecord(method, size, seed, None, 0.0, error=str(exc)))
                    continue
                runs.append(RunRecord(method, size, seed, result.tour_len_m, result.elapsed_ms))
                if config.out_dir and result.trace is not None:
                    _write_trace(config.out_dir, method, size, seed, result.trace)

    report = build_report(runs, method_order=config.methods, size_order=config.sizes)
    if config.out_dir:
        _write_runs(config.out_dir, runs)
        emit_report(report, config.out_dir)
    return report


def build_report(
    runs: list[RunRecord],
    method_order: Optional[tuple[str, ...]] = None,
    size_order: Optional[tuple[int, ...]] = None,
) -> SuiteReport:
    """Aggregate run records into a report; separated from run_suite so
    synthetic records can be aggregated in tests and tools."""
    if method_order is None:
        method_order = tuple(dict.fromkeys(r.method for r in runs))
    if size_order is None:
        size_order = tuple(sorted({r.size for r in runs}))

    report = SuiteReport()
    report.failures = [r for r in runs if not r.ok]

    for size in size_order:
        cohort: list[tuple[str, list[RunRecord]]] = []
        for method in method_order:
            good = [r for r in runs if r.method == method and r.size == size and r.ok]
            if good:
                cohort.append((method, good))
        if not cohort:
            continue
        means = {}
        for method, good in cohort:
            lengths = [r.tour_len_m for r in good]
            times = [r.elapsed_ms for r in good]
            means[method] = (population_stats(lengths), population_stats(times), lengths, times)
        best_mean = min(stats[0][0] for stats in means.values())
        for method, good in cohort:
            (len_mean, len_std, len_var), (t_mean, t_std, t_var), lengths, _ = means[method]
            gap = 0.0 if len_mean == best_mean else 100.0 * (len_mean - best_mean) / best_mean
            report.rows.append(ReportRow(
                method=method, size=size, runs=len(good),
                mean_len_m=len_mean, min_len_m=min(lengths),
                std_len_m=len_std, var_len_m=len_var, gap_pct=gap,
                mean_elapsed_ms=t_mean, std_elapsed_ms=t_std, var_elapsed_ms=t_var,
            ))
    return report


def _trace_filename(method: str, size: int, seed: int) -> str:
    safe = method.replace(":", "_")
    return f"{safe}_n{size}_seed{seed}.csv"


def _write_trace(out_dir: str, method: str, size: int, seed: int, trace: SolveTrace) -> None:
    lines = ["elapsed_ms,best_cost_m"]
    for elapsed_ms, cost in trace.samples:
        lines.append(f"{elapsed_ms!r},{cost!r}")
    path = os.path.join(out_dir, "traces", _trace_filename(method, size, seed))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _write_runs(out_dir: str, runs: list[RunRecord]) -> None:
    lines = ["method,size,seed,tour_len_m,elapsed_ms,error"]
    for r in runs:
        length = "" if r.tour_len_m is None else repr(r.tour_len_m)
        err = "" if r.error is None else r.error.replace(",", ";").replace("\n", " ")
        lines.append(f"{r.method},{r.size},{r.seed},{length},{r.elapsed_ms!r},{err}")
    atomic_write_text(os.path.join(out_dir, "runs.csv"), "\n".join(lines) + "\n")


def emit_report(report: SuiteReport, out_dir: str, formats: tuple[str, ...] = REPORT_FORMATS) -> list[str]:
    """Write report.{csv,json,md}; returns the paths written."""
    if not report.rows:
        raise ValueError("empty report")
    for fmt in formats:
        if fmt not in REPORT_FORMATS:
            raise ValueError(f"unknown format {fmt!r}, expected subset of {REPORT_FORMATS}")
    written = []
    if "csv" in formats:
        path = os.path.join(out_dir, "report.csv")
        atomic_write_text(path, report_to_csv(report))
        written.append(path)
    if "json" in formats:
        path = os.path.join(out_dir, "report.json")
        atomic_write_text(path, report_to_json(report))
        written.append(path)
    if "md" in formats:
        path = os.path.join(out_dir, "report.md")
        atomic_write_text(path, report_to_markdown(report))
        written.append(path)
    return written


def report_to_csv(report: SuiteReport) -> str:
    lines = [",".join(_CSV_COLUMNS)]
    for r in report.rows:
        lines.append(",".join([
            r.method, str(r.size), str(r.runs),
            repr(r.mean_len_m), repr(r.min_len_m), repr(r.std_len_m), repr(r.var_len_m),
            repr(r.gap_pct),
            repr(r.mean_elapsed_ms), repr(r.std_elapsed_ms), repr(r.var_elapsed_ms),
        ]))
    return "\n".join(lines) + "\n"


def load_report_csv(path: str) -> SuiteReport:
    """Parse a report.csv back into rows (inverse of report_to_csv)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().split("\n") if ln]
    if lines[0] != ",".join(_CSV_COLUMNS):
        raise ValueError(f"{path}: unexpected header {lines[0]!r}")
    report = SuiteReport()
    for line in lines[1:]:
        parts = line.split(",")
        report.rows.append(ReportRow(
            method=parts[0], size=int(parts[1]), runs=int(parts[2]),
            mean_len_m=float(parts[3]), min_len_m=float(parts[4]),
            std_len_m=float(parts[5]), var_len_m=float(parts[6]),
            gap_pct=float(parts[7]),
            mean_elapsed_ms=float(parts[8]), std_elapsed_ms=float(parts[9]),
            var_elapsed_ms=float(parts[10]),
        ))
    return report


def report_to_json(report: SuiteReport) -> str:
    doc = {
        "statistics": report.statistics,
        "rows": [vars(r) for r in report.rows],
        "failures": [
            {"method": f.method, "size": f.size, "seed": f.seed, "error": f.error}
            for f in report.failures
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def report_to_markdown(report: SuiteReport) -> str:
    """One table per size: Method | Tour Len. | Gap to best (%) | Time (s),
    best row (gap 0) in bold."""
    out = ["# Benchmark report", "", f"Statistics: {report.statistics} (std/var divide by the run count)", ""]
    for size in dict.fromkeys(r.size for r in report.rows):
        out.append(f"## n = {size}")
        out.append("")
        out.append("| Method | Tour Len. | Gap to best (%) | Time (s) |")
        out.append("|---|---|---|---|")
        for r in report.rows:
            if r.size != size:
                continue
            cells = [r.method, f"{r.mean_len_m:.1f}", f"{r.gap_pct:.2f}", f"{r.mean_elapsed_ms / 1000.0:.3f}"]
            if r.gap_pct == 0.0:
                cells = [f"**{c}**" for c in cells]
            out.append("| " + " | ".join(cells) + " |")
        out.append("")
    if report.failures:
        out.append("## Failures")
        out.append("")
        for f in report.failures:
            out.append(f"- {f.method} n={f.size} seed={f.seed}: {f.error}")
        out.append("")
    return "\n".join(out) + "\n"
