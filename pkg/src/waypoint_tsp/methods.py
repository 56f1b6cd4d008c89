"""Single registry mapping method identifiers to solver calls.

Identifiers are lowercase short names (nn, greedy_edge, insertion:cheapest,
savings, double_tree, christofides, hc, sa, tabu, gls, ql, dql, held_karp).
The uppercase routing-engine constant names many users know are accepted as
aliases. Every entry point (CLI, bench, HTTP service) resolves methods here
so they never drift apart.
"""

from __future__ import annotations

import time
from typing import Any, Optional

from . import construct, localsearch, rl
from .core import DistanceMatrix, RunResult, SolveTrace, Tour, held_karp, make_tour
from .localsearch import AnnealSchedule, Neighborhood

CANONICAL_IDS = (
    "nn",
    "greedy_edge",
    "insertion:nearest",
    "insertion:farthest",
    "insertion:cheapest",
    "savings",
    "double_tree",
    "christofides",
    "hc",
    "sa",
    "tabu",
    "gls",
    "ql",
    "dql",
    "held_karp",
)

# Alias -> (canonical id, implied params). The two starred names below are
# recognized labels with no reproducible algorithm statement behind them, so
# they resolve to an explanatory error instead of a solver.
ALIASES: dict[str, tuple[str, dict[str, Any]]] = {
    "PATH_CHEAPEST_ARC": ("nn", {}),
    "PCA": ("nn", {}),
    "LOCAL_CHEAPEST_ARC": ("nn", {}),
    "LCA": ("nn", {}),
    "GLOBAL_CHEAPEST_ARC": ("greedy_edge", {}),
    "GCA": ("greedy_edge", {}),
    "LOCAL_CHEAPEST_INSERTION": ("insertion:cheapest", {}),
    "LCI": ("insertion:cheapest", {}),
    "PARALLEL_CHEAPEST_INSERTION": ("insertion:cheapest", {"scope": "parallel"}),
    "PCI": ("insertion:cheapest", {"scope": "parallel"}),
    "SAVINGS": ("savings", {}),
    "CHRISTOFIDES": ("christofides", {}),
    "GREEDY_DESCENT": ("hc", {}),
    "GD": ("hc", {}),
    "GUIDED_LOCAL_SEARCH": ("gls", {}),
    "GLS": ("gls", {}),
    "SIMULATED_ANNEALING": ("sa", {}),
    "SA": ("sa", {}),
    "TABU_SEARCH": ("tabu", {}),
    "TS": ("tabu", {}),
    "GENERIC_TABU_SEARCH": ("tabu", {}),
    "GTS": ("tabu", {}),
}

_UNDEFINED_ALIASES = {
    "PATH_MOST_CONSTRAINED_ARC": "PMCA",
    "PMCA": "PMCA",
    "FIRST_UNBOUND_MIN_VALUE": "FUMV",
    "FUMV": "FUMV",
}

STOCHASTIC_IDS = frozenset({"sa", "ql", "dql"})

_PARAM_NAMES: dict[str, tuple[str, ...]] = {
    "nn": ("start",),
    "greedy_edge": (),
    "insertion:nearest": ("scope",),
    "insertion:farthest": ("scope",),
    "insertion:cheapest": ("scope",),
    "savings": (),
    "double_tree": (),
    "christofides": ("allow_greedy_fallback",),
    "hc": ("neighborhood",),
    "sa": ("t0", "alpha", "cost_scaled", "neighborhood"),
    "tabu": ("tenure",),
    "gls": ("lambda_factor",),
    "ql": (
        "alpha", "gamma", "epsilon", "epsilon_decay", "epsilon_min",
        "episodes", "start", "reward_mode", "decay_scope", "eval_sweep",
    ),
    "dql": (
        "alpha", "gamma", "epsilon", "epsilon_decay", "epsilon_min",
        "episodes", "start", "reward_mode", "decay_scope", "eval_sweep",
    ),
    "held_karp": (),
}


class UnknownMethodError(ValueError):
    """Raised for method names outside the registry; carries the valid ids."""

    def __init__(self, name: str, message: Optional[str] = None):
        self.name = name
        self.valid_ids = CANONICAL_IDS
        if message is None:
            message = (
                f"unknown method {name!r}; valid methods: {', '.join(CANONICAL_IDS)}"
            )
        super().__init__(message)


def parse_method(name: str) -> tuple[str, dict[str, Any]]:
    """Resolve a user-supplied method name to (canonical id, implied params)."""
    cleaned = name.strip()
    if cleaned in _UNDEFINED_ALIASES:
        raise UnknownMethodError(
            cleaned,
            f"{cleaned!r} is a recognized strategy label with no reproducible "
            f"algorithm statement; it cannot be run. Valid methods: {', '.join(CANONICAL_IDS)}",
        )
    if cleaned in ALIASES:
        return ALIASES[cleaned]
    lowered = cleaned.lower()
    if lowered in CANONICAL_IDS:
        return lowered, {}
    raise UnknownMethodError(cleaned)


def is_stochastic(method: str) -> bool:
    method_id, _ = parse_method(method)
    return method_id in STOCHASTIC_IDS


def catalog() -> list[dict[str, Any]]:
    """Method descriptions for UIs: id, label, kind, stochastic flag, and
    tunable parameters with defaults."""
    defs = [
        ("nn", "Nearest neighbor", "construction", [("start", 0)]),
        ("greedy_edge", "Greedy edge matching", "construction", []),
        ("insertion:nearest", "Nearest insertion", "construction", [("scope", "sequential")]),
        ("insertion:farthest", "Farthest insertion", "construction", [("scope", "sequential")]),
        ("insertion:cheapest", "Cheapest insertion", "construction", [("scope", "sequential")]),
        ("savings", "Clarke-Wright savings", "construction", []),
        ("double_tree", "Double spanning tree (2-approx)", "construction", []),
        ("christofides", "Christofides (1.5-approx)", "construction",
         [("allow_greedy_fallback", True)]),
        ("hc", "Hill climbing descent", "metaheuristic", []),
        ("sa", "Simulated annealing", "metaheuristic", [("t0", 1), ("alpha", 0.99)]),
        ("tabu", "Tabu search", "metaheuristic", [("tenure", None)]),
        ("gls", "Guided local search", "metaheuristic", [("lambda_factor", 0.1)]),
        ("ql", "Q-learning", "rl",
         [("alpha", 0.01), ("gamma", 0.95), ("epsilon", 0.99),
          ("epsilon_decay", 0.995), ("epsilon_min", 0.5), ("episodes", None)]),
        ("dql", "Double Q-learning", "rl",
         [("alpha", 0.01), ("gamma", 0.95), ("epsilon", 0.99),
          ("epsilon_decay", 0.995), ("epsilon_min", 0.5), ("episodes", None)]),
        ("held_karp", "Held-Karp exact (n <= 18)", "exact", []),
    ]
    return [
        {
            "id": mid,
            "label": label,
            "kind": kind,
            "stochastic": mid in STOCHASTIC_IDS,
            "params": [{"name": n, "default": d} for n, d in params],
        }
        for mid, label, kind, params in defs
    ]


def _single_record_trace(elapsed_ms: float, length_m: float) -> SolveTrace:
    trace = SolveTrace()
    trace.record(elapsed_ms, length_m)
    return trace


def _rl_config(params: dict[str, Any]) -> rl.RlConfig:
    kwargs = {}
    for key in (
        "alpha", "gamma", "epsilon", "epsilon_decay", "epsilon_min",
        "episodes", "reward_mode", "decay_scope", "eval_sweep",
    ):
        if params.get(key) is not None:
            kwargs[key] = params[key]
    return rl.RlConfig(**kwargs)


def solve(
    matrix: DistanceMatrix,
    method: str,
    seed: int = 0,
    time_budget_ms: Optional[float] = None,
    max_iters: Optional[int] = None,
    params: Optional[dict[str, Any]] = None,
) -> RunResult:
    """Run one method on one distance matrix and normalize the outcome.

    seed feeds the stochastic methods (and is echoed for the others). Budgets
    apply to the iterative methods; constructions always run to completion.
    Unknown method names raise UnknownMethodError, unknown params ValueError.
    """
    method_id, implied = parse_method(method)
    merged: dict[str, Any] = {**implied, **(params or {})}
    allowed = _PARAM_NAMES[method_id]
    for key in merged:
        if key not in allowed:
            raise ValueError(
                f"unknown parameter {key!r} for method {method_id!r}; "
                f"allowed: {', '.join(allowed) if allowed else '(none)'}"
            )

    n = matrix.n
    t_begin = time.perf_counter()

    def finish(tour: Tour, trace: Optional[SolveTrace]) -> RunResult:
        elapsed_ms = (time.perf_counter() - t_begin) * 1000.0
        if trace is None:
            trace = _single_record_trace(elapsed_ms, tour.length_m)
        return RunResult(
            method=method_id,
            tour_len_m=tour.length_m,
            gap_pct=None,
            elapsed_ms=elapsed_ms,
            seed=seed,
            trace=trace,
            order=tour.order,
        )

    if n == 2:
        return finish(make_tour([0, 1], matrix), None)

    if method_id == "nn":
        return finish(construct.nearest_neighbor(matrix, start=merged.get("start", 0)), None)
    if method_id == "greedy_edge":
        return finish(construct.greedy_edge(matrix), None)
    if method_id.startswith("insertion:"):
        strategy = construct.InsertionStrategy(
            selector=method_id.split(":", 1)[1],
            scope=merged.get("scope", "sequential"),
        )
        return finish(construct.insertion(matrix, strategy), None)
    if method_id == "savings":
        return finish(construct.savings(matrix), None)
    if method_id == "double_tree":
        return finish(construct.double_tree(matrix), None)
    if method_id == "christofides":
        allow = merged.get("allow_greedy_fallback", True)
        return finish(construct.christofides(matrix, allow_greedy_fallback=allow), None)
    if method_id == "held_karp":
        return finish(held_karp(matrix), None)

    seed_tour = construct.nearest_neighbor(matrix, start=0)

    if method_id == "hc":
        neighborhood = Neighborhood(merged.get("neighborhood", "two_opt"))
        tour, trace = localsearch.hill_climb(
            seed_tour, matrix, neighborhood,
            time_budget_ms=time_budget_ms, max_iters=max_iters,
        )
        return finish(tour, trace)
    if method_id == "sa":
        schedule = AnnealSchedule(
            t0=float(merged.get("t0", 1.0)),
            alpha=float(merged.get("alpha", 0.99)),
            cost_scaled=bool(merged.get("cost_scaled", True)),
        )
        neighborhood = Neighborhood(merged.get("neighborhood", "two_opt"))
        tour, trace = localsearch.simulated_annealing(
            seed_tour, matrix, schedule, neighborhood, rng_seed=seed,
            time_budget_ms=time_budget_ms, max_iters=max_iters,
        )
        return finish(tour, trace)
    if method_id == "tabu":
        tour, trace = localsearch.tabu_search(
            seed_tour, matrix, tenure=merged.get("tenure"), rng_seed=seed,
            time_budget_ms=time_budget_ms, max_iters=max_iters,
        )
        return finish(tour, trace)
    if method_id == "gls":
        tour, trace = localsearch.guided_local_search(
            seed_tour, matrix, lambda_factor=float(merged.get("lambda_factor", 0.1)),
            rng_seed=seed, time_budget_ms=time_budget_ms, max_iters=max_iters,
        )
        return finish(tour, trace)
    if method_id in ("ql", "dql"):
        if max_iters is not None and merged.get("episodes") is None:
            merged["episodes"] = max_iters
        config = _rl_config(merged)
        trace = SolveTrace()
        train = rl.train_q if method_id == "ql" else rl.train_double_q
        tour, _, _ = train(
            matrix, config, rng_seed=seed, start=merged.get("start", 0),
            time_budget_ms=time_budget_ms, trace=trace,
        )
        return finish(tour, trace)

    raise UnknownMethodError(method_id)  # unreachable; parse_method screens names
