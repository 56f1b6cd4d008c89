"""Anytime tour improvers: greedy descent, simulated annealing, tabu, guided.

Each solver takes a seed tour, returns (best tour, trace), and never returns
anything longer than its seed. Budgets are dual: max_iters gives bitwise
deterministic runs (used by tests), time_budget_ms gives wall-clock anytime
behavior (used by benchmarks and the service). With neither, a solver-specific
default iteration cap applies.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

import numpy as np

from .core import DistanceMatrix, SolveTrace, Tour, make_tour, tour_length, validate_permutation

IMPROVE_EPS = 1e-9  # meters; a move must beat this to count as improving

NEIGHBORHOOD_KINDS = ("adjacent_swap", "two_opt", "or_opt")

_OR_OPT_SEGMENTS = (1, 2, 3)


@dataclass(frozen=True)
class Neighborhood:
    """A move family over tours; every move maps a valid tour to a valid tour."""

    kind: str = "two_opt"

    def __post_init__(self):
        if self.kind not in NEIGHBORHOOD_KINDS:
            raise ValueError(f"unknown neighborhood {self.kind!r}, expected one of {NEIGHBORHOOD_KINDS}")


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric cooling: temperature after k proposals is t0 * alpha**k.

    cost_scaled multiplies t0 by the seed tour length at solve time so the
    acceptance rule behaves the same at meter scale as at unit scale.
    """

    t0: float = 1.0
    alpha: float = 0.99
    cost_scaled: bool = True

    def __post_init__(self):
        if not self.t0 > 0:
            raise ValueError(f"t0 must be positive, got {self.t0}")
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")

    def temperature_at(self, k: int, scale: float = 1.0) -> float:
        return (self.t0 * scale) * self.alpha ** k


class _Budget:
    """Shared stopping rule: wall clock, iteration cap, or a default cap."""

    def __init__(self, time_budget_ms: Optional[float], max_iters: Optional[int], default_iters: int):
        if time_budget_ms is not None and time_budget_ms <= 0:
            raise ValueError("time_budget_ms must be positive")
        if max_iters is not None and max_iters < 0:
            raise ValueError("max_iters must be nonnegative")
        self.start = time.perf_counter()
        self.deadline = None if time_budget_ms is None else self.start + time_budget_ms / 1000.0
        if max_iters is None:
            self.max_iters = None if time_budget_ms is not None else default_iters
        else:
            self.max_iters = max_iters

    def elapsed_ms(self) -> float:
        return (time.perf_counter() - self.start) * 1000.0

    def expired(self) -> bool:
        return self.deadline is not None and time.perf_counter() >= self.deadline

    def iterations_done(self, k: int) -> bool:
        return self.max_iters is not None and k >= self.max_iters


def acceptance_probability(delta: float, temperature: float) -> float:
    """Probability of accepting a move that changes cost by delta at the given
    temperature: 1 for improvements, e^(-delta/T) otherwise."""
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    if delta <= 0:
        return 1.0
    return math.exp(-delta / temperature)


def _iter_moves(kind: str, n: int) -> Iterator[tuple]:
    """Canonical move enumeration; scan order is the documented tie-break order."""
    if kind == "two_opt":
        for i in range(1, n - 1):
            for j in range(i + 1, n):
                yield (i, j)
    elif kind == "adjacent_swap":
        for p in range(n):
            yield (p,)
    else:  # or_opt
        for length in _OR_OPT_SEGMENTS:
            if length >= n:
                break
            for i in range(n - length + 1):
                before = (i - 1) % n
                for m in range(n):
                    if i <= m < i + length or m == before:
                        continue
                    yield (i, length, m)


def move_delta(order: list[int], move: tuple, d: np.ndarray, kind: str) -> float:
    """Length change of applying move; the exact expression (association order
    included) is shared by every scanner and test in this package."""
    n = len(order)
    if kind == "two_opt":
        i, j = move
        a, b = order[i - 1], order[i]
        c, e = order[j], order[(j + 1) % n]
        return float((d[a, c] + d[b, e]) - d[a, b] - d[c, e])
    if kind == "adjacent_swap":
        p = move[0]
        prev_city = order[(p - 1) % n]
        x, y = order[p], order[(p + 1) % n]
        nxt = order[(p + 2) % n]
        return float((d[prev_city, y] + d[x, nxt]) - d[prev_city, x] - d[y, nxt])
    i, length, m = move
    p = order[(i - 1) % n]
    s0, s1 = order[i], order[i + length - 1]
    nx = order[(i + length) % n]
    a, b = order[m], order[(m + 1) % n]
    return float((d[p, nx] + d[a, s0] + d[s1, b]) - d[p, s0] - d[s1, nx] - d[a, b])


def apply_move(order: list[int], move: tuple, kind: str) -> list[int]:
    n = len(order)
    if kind == "two_opt":
        i, j = move
        return order[:i] + order[i:j + 1][::-1] + order[j + 1:]
    if kind == "adjacent_swap":
        p = move[0]
        q = (p + 1) % n
        out = list(order)
        out[p], out[q] = out[q], out[p]
        return out
    i, length, m = move
    segment = order[i:i + length]
    rest = order[:i] + order[i + length:]
    anchor = rest.index(order[m])
    return rest[:anchor + 1] + segment + rest[anchor + 1:]


def _two_opt_delta_matrix(order: list[int], d: np.ndarray) -> np.ndarray:
    """Deltas for every (i, j) two-opt move, same arithmetic as move_delta.

    Rows are i, columns j; entries off the valid i < j region are +inf.
    """
    n = len(order)
    o = np.asarray(order)
    a = o[np.arange(n) - 1]        # predecessor city of position i (wraps at 0)
    b = o
    c = o
    e = o[(np.arange(n) + 1) % n]  # successor city of position j
    deltas = (d[np.ix_(a, c)] + d[np.ix_(b, e)]) - d[a, b][:, None] - d[c, e][None, :]
    ii = np.arange(n)[:, None]
    jj = np.arange(n)[None, :]
    deltas[(ii == 0) | (jj <= ii)] = np.inf
    return deltas


def best_improvement_move(
    order: list[int],
    matrix: DistanceMatrix,
    neighborhood: Neighborhood,
    deadline: Optional[float] = None,
) -> Optional[tuple[float, tuple]]:
    """Most negative move in the neighborhood, or None when nothing beats
    IMPROVE_EPS. Ties go to the earliest move in canonical enumeration order."""
    d = matrix.d
    n = len(order)
    if neighborhood.kind == "two_opt":
        deltas = _two_opt_delta_matrix(order, d)
        flat = int(np.argmin(deltas))
        i, j = flat // n, flat % n
        best = float(deltas[i, j])
        if best < -IMPROVE_EPS:
            return best, (i, j)
        return None
    best = None
    checked = 0
    for move in _iter_moves(neighborhood.kind, n):
        delta = move_delta(order, move, d, neighborhood.kind)
        if delta < -IMPROVE_EPS and (best is None or delta < best[0]):
            best = (delta, move)
        checked += 1
        if deadline is not None and checked % 256 == 0 and time.perf_counter() >= deadline:
            break
    return best


def hill_climb(
    seed: Tour,
    matrix: DistanceMatrix,
    neighborhood: Neighborhood | None = None,
    time_budget_ms: Optional[float] = None,
    max_iters: Optional[int] = None,
) -> tuple[Tour, SolveTrace]:
    """Best-improvement descent; stops at a local optimum of the neighborhood
    or when the budget runs out, whichever comes first."""
    if neighborhood is None:
        neighborhood = Neighborhood("two_opt")
    validate_permutation(seed.order, matrix.n)
    budget = _Budget(time_budget_ms, max_iters, default_iters=1_000_000)
    order = list(seed.order)
    current = tour_length(order, matrix)
    trace = SolveTrace()
    trace.record(budget.elapsed_ms(), current)

    k = 0
    while not budget.iterations_done(k) and not budget.expired():
        found = best_improvement_move(order, matrix, neighborhood, budget.deadline)
        if found is None:
            break
        delta, move = found
        order = apply_move(order, move, neighborhood.kind)
        current += delta
        trace.record(budget.elapsed_ms(), current)
        k += 1

    return make_tour(order, matrix), trace


def _random_move(kind: str, n: int, rng: random.Random) -> tuple:
    if kind == "two_opt":
        i = rng.randrange(1, n - 1)
        j = rng.randrange(i + 1, n)
        return (i, j)
    if kind == "adjacent_swap":
        return (rng.randrange(n),)
    # A segment of length s leaves an anchor only when n - (s + 1) >= 1.
    length = rng.choice([s for s in _OR_OPT_SEGMENTS if s <= n - 2])
    i = rng.randrange(n - length + 1)
    before = (i - 1) % n
    anchors = [m for m in range(n) if not (i <= m < i + length or m == before)]
    return (i, length, anchors[rng.randrange(len(anchors))])


def simulated_annealing(
    seed: Tour,
    matrix: DistanceMatrix,
    schedule: AnnealSchedule | None = None,
    neighborhood: Neighborhood | None = None,
    rng_seed: int = 0,
    time_budget_ms: Optional[float] = None,
    max_iters: Optional[int] = None,
) -> tuple[Tour, SolveTrace]:
    """Random-proposal annealing: improving moves always accepted, worsening
    ones with probability e^(-delta/T), T decaying geometrically per proposal
    (accepted or not). Returns the best tour seen, not the final state."""
    if schedule is None:
        schedule = AnnealSchedule()
    if neighborhood is None:
        neighborhood = Neighborhood("two_opt")
    validate_permutation(seed.order, matrix.n)
    n = matrix.n
    if n < 3:
        trace = SolveTrace()
        tour = make_tour(list(seed.order), matrix)
        trace.record(0.0, tour.length_m)
        return tour, trace
    budget = _Budget(time_budget_ms, max_iters, default_iters=20_000)
    rng = random.Random(rng_seed)
    d = matrix.d

    order = list(seed.order)
    current = tour_length(order, matrix)
    best_order = list(order)
    best = current
    scale = current if schedule.cost_scaled else 1.0
    t0_eff = schedule.t0 * scale

    trace = SolveTrace()
    trace.record(budget.elapsed_ms(), best)

    k = 0
    while not budget.iterations_done(k) and not budget.expired():
        move = _random_move(neighborhood.kind, n, rng)
        delta = move_delta(order, move, d, neighborhood.kind)
        if delta <= 0:
            accept = True
        else:
            temperature = t0_eff * schedule.alpha ** k
            # Geometric decay underflows to exactly 0.0 on long runs; a
            # frozen system rejects every worsening move.
            prob = acceptance_probability(delta, temperature) if temperature > 0.0 else 0.0
            accept = rng.random() < prob
        if accept:
            order = apply_move(order, move, neighborhood.kind)
            current += delta
            if current < best:
                best = current
                best_order = list(order)
                trace.record(budget.elapsed_ms(), best)
        k += 1

    return make_tour(best_order, matrix), trace


def _edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def _two_opt_edges(order: list[int], move: tuple[int, int]) -> tuple[tuple, tuple]:
    """(removed pair, added pair) of undirected edges for a two-opt move."""
    n = len(order)
    i, j = move
    a, b = order[i - 1], order[i]
    c, e = order[j], order[(j + 1) % n]
    removed = tuple(sorted((_edge_key(a, b), _edge_key(c, e))))
    added = tuple(sorted((_edge_key(a, c), _edge_key(b, e))))
    return removed, added


def tabu_search(
    seed: Tour,
    matrix: DistanceMatrix,
    tenure: Optional[int] = None,
    rng_seed: int = 0,
    time_budget_ms: Optional[float] = None,
    max_iters: Optional[int] = None,
) -> tuple[Tour, SolveTrace]:
    """Best-admissible two-opt steps with a recency memory.

    Accepting a move stores the pair of edges it removed; a later move is tabu
    while the pair of edges it would add matches a stored entry, unless it
    beats the global best (aspiration). The search always moves, worsening or
    not, and returns the best tour visited. rng_seed is accepted for interface
    parity; the scan itself is deterministic.
    """
    del rng_seed
    n = matrix.n
    validate_permutation(seed.order, matrix.n)
    if tenure is None:
        tenure = max(10, n // 4)
    if tenure < 1:
        raise ValueError(f"tenure must be >= 1, got {tenure}; use hill_climb for memoryless descent")
    budget = _Budget(time_budget_ms, max_iters, default_iters=500)
    d = matrix.d

    order = list(seed.order)
    current = tour_length(order, matrix)
    best = current
    best_order = list(order)
    trace = SolveTrace()
    trace.record(budget.elapsed_ms(), best)

    tabu_until: dict[tuple, int] = {}
    k = 0
    while not budget.iterations_done(k) and not budget.expired():
        chosen = None
        aborted = False
        for i in range(1, n - 1):
            if budget.deadline is not None and time.perf_counter() >= budget.deadline:
                aborted = True
                break
            for j in range(i + 1, n):
                move = (i, j)
                delta = move_delta(order, move, d, "two_opt")
                if chosen is not None and delta >= chosen[0]:
                    continue
                _, added = _two_opt_edges(order, move)
                if tabu_until.get(added, -1) > k and not (current + delta < best - IMPROVE_EPS):
                    continue
                chosen = (delta, move)
        if aborted or chosen is None:
            break
        delta, move = chosen
        removed, _ = _two_opt_edges(order, move)
        tabu_until[removed] = k + tenure
        order = apply_move(order, move, "two_opt")
        current += delta
        if current < best:
            best = current
            best_order = list(order)
            trace.record(budget.elapsed_ms(), best)
        k += 1

    return make_tour(best_order, matrix), trace


def guided_local_search(
    seed: Tour,
    matrix: DistanceMatrix,
    lambda_factor: float = 0.1,
    rng_seed: int = 0,
    time_budget_ms: Optional[float] = None,
    max_iters: Optional[int] = None,
) -> tuple[Tour, SolveTrace]:
    """Two-opt descent on a penalty-augmented cost, escalating penalties on
    the highest-utility edges (utility = length / (1 + penalty)) each time a
    local optimum is reached. The tour returned is the best by true length.

    With all penalties zero the first descent is exactly hill_climb on
    two_opt, so the result can never be worse than greedy descent. rng_seed
    is accepted for interface parity; the procedure is deterministic.
    """
    del rng_seed
    if not lambda_factor > 0:
        raise ValueError(f"lambda_factor must be positive, got {lambda_factor}")
    n = matrix.n
    validate_permutation(seed.order, matrix.n)
    budget = _Budget(time_budget_ms, max_iters, default_iters=50)
    d = matrix.d

    order = list(seed.order)
    current = tour_length(order, matrix)
    lam = lambda_factor * current / n
    best = current
    best_order = list(order)
    trace = SolveTrace()
    trace.record(budget.elapsed_ms(), best)

    penalties: dict[tuple[int, int], int] = {}

    def penalty(u: int, v: int) -> int:
        return penalties.get(_edge_key(u, v), 0)

    cycles = 0
    while not budget.iterations_done(cycles) and not budget.expired():
        # Descend on augmented cost until no augmented-improving move remains.
        while not budget.expired():
            chosen = None
            for i in range(1, n - 1):
                if budget.deadline is not None and time.perf_counter() >= budget.deadline:
                    break
                for j in range(i + 1, n):
                    move = (i, j)
                    delta = move_delta(order, move, d, "two_opt")
                    a, b = order[i - 1], order[i]
                    c, e = order[j], order[(j + 1) % n]
                    pen_delta = penalty(a, c) + penalty(b, e) - penalty(a, b) - penalty(c, e)
                    aug = delta + lam * pen_delta
                    if aug < -IMPROVE_EPS and (chosen is None or aug < chosen[0]):
                        chosen = (aug, delta, move)
            if chosen is None:
                break
            _, delta, move = chosen
            order = apply_move(order, move, "two_opt")
            current += delta
            if current < best:
                best = current
                best_order = list(order)
                trace.record(budget.elapsed_ms(), best)

        if budget.expired():
            break
        # Penalize every maximum-utility edge of the local optimum.
        utilities = []
        for p in range(n):
            u, v = order[p], order[(p + 1) % n]
            key = _edge_key(u, v)
            utilities.append((float(d[u, v]) / (1 + penalties.get(key, 0)), key))
        top = max(u for u, _ in utilities)
        for u, key in utilities:
            if u == top:
                penalties[key] = penalties.get(key, 0) + 1
        cycles += 1

    return make_tour(best_order, matrix), trace
