"""Command-line front door.

Verbs: solve (run one method on a waypoint file), bench run (comparison
suite), landscape (toy-surface walks), gen (seeded synthetic dataset), grid
(regular point grid), serve (HTTP service).

Exit codes: 0 success, 1 runtime failure, 2 usage error. The environment
variable WAYPOINT_TSP_SEED supplies the default --seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from typing import Any, Optional

from . import bench as bench_mod
from . import methods
from .core import build_distance_matrix, make_tour
from .data import (
    DEFAULT_BBOX,
    BoundingBox,
    export_route,
    generate_dataset,
    grid_points,
    load_waypoints,
    save_waypoints,
)
from .ioutil import atomic_write_text
from .landscape import get_landscape, hc_walk, sa_walk, snap_to_grid
from .methods import UnknownMethodError
from .rl import BudgetExhaustedError


def _env_seed() -> int:
    raw = os.environ.get("WAYPOINT_TSP_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        print(f"warning: ignoring non-integer WAYPOINT_TSP_SEED={raw!r}", file=sys.stderr)
        return 0


def _parse_param(text: str) -> tuple[str, Any]:
    if "=" not in text:
        raise ValueError(f"--param expects KEY=VALUE, got {text!r}")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def _parse_bbox(text: Optional[str], planar: bool) -> BoundingBox:
    if text is None:
        return DEFAULT_BBOX
    parts = text.split(",")
    if len(parts) != 4:
        raise ValueError(f"--bbox expects 4 comma-separated numbers, got {text!r}")
    a, b, c, d = (float(p) for p in parts)
    kind = "planar" if planar else "geographic"
    return BoundingBox(a, b, c, d, kind)


def _write_trace_csv(path: str, samples: list[tuple[float, float]]) -> None:
    lines = ["elapsed_ms,best_cost_m"]
    for elapsed_ms, cost in samples:
        lines.append(f"{elapsed_ms!r},{cost!r}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def cmd_solve(args: argparse.Namespace) -> int:
    params = dict(_parse_param(p) for p in args.param or [])
    methods.parse_method(args.method)  # fail fast as a usage error
    points = load_waypoints(args.infile)
    matrix = build_distance_matrix(points)
    result = methods.solve(
        matrix, args.method, seed=args.seed,
        time_budget_ms=args.budget_ms, max_iters=args.max_iters, params=params,
    )
    if args.out:
        export_route(make_tour(result.order, matrix), points, args.out)
    if args.trace and result.trace is not None:
        _write_trace_csv(args.trace, result.trace.samples)
    print(f"{result.method} length_m={result.tour_len_m:.3f} elapsed_ms={result.elapsed_ms:.1f}")
    return 0


def cmd_bench_run(args: argparse.Namespace) -> int:
    config = bench_mod.SuiteConfig(
        methods=tuple(m.strip() for m in args.methods.split(",") if m.strip()),
        sizes=tuple(int(s) for s in args.sizes.split(",")),
        repeats=args.repeats,
        rng_seed=args.seed,
        time_budget_ms=args.budget_ms,
        max_iters=args.max_iters,
        out_dir=args.out,
    )
    report = bench_mod.run_suite(config)
    for name in ("report.csv", "report.json", "report.md"):
        print(f"wrote {os.path.join(args.out, name)}")
    if report.failures:
        print(f"{len(report.failures)} run(s) failed; see report.md", file=sys.stderr)
    return 0


def _plot_walk_svg(trace, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    iters = [s.iteration for s in trace.steps]
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ax.plot(iters, [s.objective for s in trace.steps], color="tab:blue", label="objective")
    ax.set_xlabel("iteration")
    ax.set_ylabel("objective")
    title = f"{trace.kind} walk, {trace.landscape} surface"
    if trace.kind == "sa":
        ax2 = ax.twinx()
        ax2.plot(iters, [s.temperature for s in trace.steps], color="tab:red",
                 alpha=0.6, label="temperature")
        ax2.set_ylabel("temperature")
    ax.set_title(title)
    fig.tight_layout()
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)), suffix=".svg")
    try:
        with os.fdopen(fd, "wb") as fh:
            fig.savefig(fh, format="svg")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    finally:
        plt.close(fig)


def cmd_landscape(args: argparse.Namespace) -> int:
    try:
        parts = args.start.split(",")
        if len(parts) != 2:
            raise ValueError(f"--start expects X1,X2, got {args.start!r}")
        start = (float(parts[0]), float(parts[1]))
        snap_to_grid(start[0])
        snap_to_grid(start[1])
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    surface = get_landscape(args.kind)
    if args.method == "hc":
        trace = hc_walk(surface, start, max_iters=args.iters)
    else:
        trace = sa_walk(surface, start, t0=args.t0, alpha=args.alpha,
                        rng_seed=args.seed, max_iters=args.iters)
    if args.out_csv:
        trace.save(args.out_csv)
    if args.out_svg:
        _plot_walk_svg(trace, args.out_svg)
    final = trace.final
    print(f"{args.method} on {surface.kind}: final objective {final.objective!r} "
          f"at ({final.x1!r}, {final.x2!r}) after {final.iteration} iterations")
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    bbox = _parse_bbox(args.bbox, args.planar)
    points = generate_dataset(args.n, bbox, rng_seed=args.seed)
    save_waypoints(points, args.out)
    print(f"wrote {len(points)} points to {args.out}")
    return 0


def cmd_grid(args: argparse.Namespace) -> int:
    bbox = _parse_bbox(args.bbox, args.planar)
    points = grid_points(bbox, args.rows, args.cols)
    save_waypoints(points, args.out)
    print(f"wrote {len(points)} points to {args.out}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    static = args.static
    if static is None:
        candidate = os.path.join(os.getcwd(), "frontend", "dist")
        static = candidate if os.path.isdir(candidate) else None
    app = create_app(
        static_dir=static,
        max_concurrent_solves=args.max_concurrent,
        cors_origins=args.cors_origin or None,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="waypoint-tsp",
        description="Plan, benchmark, and serve closed waypoint tours.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    seed_default = _env_seed()

    p_solve = sub.add_parser("solve", help="run one method on a waypoint file")
    p_solve.add_argument("--in", dest="infile", required=True, help="waypoint CSV or GeoJSON")
    p_solve.add_argument("--method", required=True,
                         help="method id, e.g. " + ", ".join(methods.CANONICAL_IDS))
    p_solve.add_argument("--out", help="route JSON output path")
    p_solve.add_argument("--trace", help="cost-over-time CSV output path")
    p_solve.add_argument("--seed", type=int, default=seed_default)
    p_solve.add_argument("--budget-ms", type=float, default=None)
    p_solve.add_argument("--max-iters", type=int, default=None)
    p_solve.add_argument("--param", action="append", metavar="KEY=VALUE",
                         help="method parameter, repeatable")
    p_solve.set_defaults(func=cmd_solve)

    p_bench = sub.add_parser("bench", help="benchmark suites")
    bench_sub = p_bench.add_subparsers(dest="bench_verb", required=True)
    p_run = bench_sub.add_parser("run", help="run a method x size suite")
    p_run.add_argument("--methods", required=True, help="comma-separated method ids")
    p_run.add_argument("--sizes", required=True, help="comma-separated point counts")
    p_run.add_argument("--repeats", type=int, default=10)
    p_run.add_argument("--seed", type=int, default=42 if seed_default == 0 else seed_default)
    p_run.add_argument("--budget-ms", type=float, default=None)
    p_run.add_argument("--max-iters", type=int, default=None)
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.set_defaults(func=cmd_bench_run)

    p_land = sub.add_parser("landscape", help="hill-climb or anneal on a toy surface")
    p_land.add_argument("--kind", choices=("single", "multi"), required=True)
    p_land.add_argument("--method", choices=("hc", "sa"), required=True)
    p_land.add_argument("--start", required=True, metavar="X1,X2",
                        help="start position on the 0.05 grid")
    p_land.add_argument("--seed", type=int, default=seed_default)
    p_land.add_argument("--t0", type=float, default=1.0)
    p_land.add_argument("--alpha", type=float, default=0.99)
    p_land.add_argument("--iters", type=int, default=5000)
    p_land.add_argument("--out-csv", help="walk trace CSV path")
    p_land.add_argument("--out-svg", help="objective curve SVG path")
    p_land.set_defaults(func=cmd_landscape)

    p_gen = sub.add_parser("gen", help="generate a seeded synthetic dataset")
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--seed", type=int, default=seed_default)
    p_gen.add_argument("--bbox", help="min_lat,max_lat,min_lon,max_lon (default 11 km^2 site)")
    p_gen.add_argument("--planar", action="store_true", help="treat bbox as planar meters")
    p_gen.add_argument("--out", required=True, help="waypoint CSV path")
    p_gen.set_defaults(func=cmd_gen)

    p_grid = sub.add_parser("grid", help="generate a rows x cols point grid")
    p_grid.add_argument("--rows", type=int, required=True)
    p_grid.add_argument("--cols", type=int, required=True)
    p_grid.add_argument("--bbox", help="min_lat,max_lat,min_lon,max_lon (default 11 km^2 site)")
    p_grid.add_argument("--planar", action="store_true", help="treat bbox as planar meters")
    p_grid.add_argument("--out", required=True, help="waypoint CSV path")
    p_grid.set_defaults(func=cmd_grid)

    p_serve = sub.add_parser("serve", help="run the HTTP planning service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--static", help="UI bundle directory (default: ./frontend/dist if present)")
    p_serve.add_argument("--max-concurrent", type=int, default=4)
    p_serve.add_argument("--cors-origin", action="append", help="allowed CORS origin, repeatable")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UnknownMethodError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except BudgetExhaustedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
