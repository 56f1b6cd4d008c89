"""Distance geometry, tour primitives, and the exact dynamic-programming solver.

Everything downstream (construction heuristics, local search, RL, the HTTP
service) works against the types defined here. All values are immutable after
construction, so matrices and tours can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

EARTH_RADIUS_M = 6_371_000.0

GEOGRAPHIC = "geographic"
PLANAR = "planar"

HELD_KARP_MAX_N = 18


@dataclass(frozen=True)
class Waypoint:
    """One sampling point.

    For geographic sets, lat/lon are degrees. For planar sets the same slots
    hold y/x in meters (lat = y, lon = x) so a single record type serves both.
    """

    id: int
    lat: float
    lon: float


@dataclass(frozen=True)
class WaypointSet:
    """An ordered collection of waypoints with one coordinate kind for all."""

    points: tuple[Waypoint, ...]
    kind: str = GEOGRAPHIC

    def __post_init__(self):
        if self.kind not in (GEOGRAPHIC, PLANAR):
            raise ValueError(f"unknown coordinate kind: {self.kind!r}")
        ids = [p.id for p in self.points]
        if ids != list(range(len(ids))):
            raise ValueError("waypoint ids must be dense 0..n-1 in order")
        if self.kind == GEOGRAPHIC:
            for p in self.points:
                if not (-90.0 <= p.lat <= 90.0):
                    raise ValueError(f"waypoint {p.id}: latitude {p.lat} out of [-90, 90]")
                if not (-180.0 <= p.lon <= 180.0):
                    raise ValueError(f"waypoint {p.id}: longitude {p.lon} out of [-180, 180]")
        for p in self.points:
            if not (math.isfinite(p.lat) and math.isfinite(p.lon)):
                raise ValueError(f"waypoint {p.id}: non-finite coordinate")

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Waypoint]:
        return iter(self.points)

    def lats(self) -> np.ndarray:
        return np.array([p.lat for p in self.points], dtype=np.float64)

    def lons(self) -> np.ndarray:
        return np.array([p.lon for p in self.points], dtype=np.float64)


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric pairwise distances in meters with a zero diagonal."""

    d: np.ndarray
    metric_kind: str

    @property
    def n(self) -> int:
        return self.d.shape[0]


@dataclass(frozen=True)
class Tour:
    """A closed visiting order; the cycle implicitly returns to order[0]."""

    order: tuple[int, ...]
    length_m: float


@dataclass
class SolveTrace:
    """Best-cost-so-far samples recorded while a solver runs.

    samples are (elapsed_ms, best_cost_m) pairs; elapsed is nondecreasing and
    best cost nonincreasing by construction (record() enforces both).
    """

    samples: list[tuple[float, float]] = field(default_factory=list)

    def record(self, elapsed_ms: float, best_cost_m: float) -> None:
        if self.samples:
            last_t, last_c = self.samples[-1]
            elapsed_ms = max(elapsed_ms, last_t)
            best_cost_m = min(best_cost_m, last_c)
        self.samples.append((elapsed_ms, best_cost_m))

    def is_monotone(self) -> bool:
        ts = [t for t, _ in self.samples]
        cs = [c for _, c in self.samples]
        return ts == sorted(ts) and cs == sorted(cs, reverse=True)


@dataclass
class RunResult:
    """One solver invocation, as persisted by the benchmark harness."""

    method: str
    tour_len_m: float
    gap_pct: float
    elapsed_ms: float
    seed: int
    trace: Optional[SolveTrace] = None
    order: Optional[tuple[int, ...]] = None


def validate_permutation(order: Sequence[int], n: int) -> None:
    """Raise ValueError unless order is a permutation of 0..n-1."""
    if len(order) != n or sorted(order) != list(range(n)):
        raise ValueError(f"order is not a permutation of 0..{n - 1}: {list(order)!r}")


def build_distance_matrix(points: WaypointSet, metric: str | None = None) -> DistanceMatrix:
    """Build the full pairwise matrix for a waypoint set.

    metric defaults to haversine for geographic sets and euclidean for planar
    ones; passing a metric that disagrees with the set's coordinate kind is an
    error rather than a silent reinterpretation.
    """
    n = len(points)
    if n == 0:
        raise ValueError("cannot build a distance matrix for an empty waypoint set")
    expected = "haversine" if points.kind == GEOGRAPHIC else "euclidean"
    if metric is None:
        metric = expected
    if metric != expected:
        raise ValueError(f"metric {metric!r} does not apply to {points.kind} coordinates")

    if metric == "haversine":
        lat = np.radians(points.lats())
        lon = np.radians(points.lons())
        dlat = lat[:, None] - lat[None, :]
        dlon = lon[:, None] - lon[None, :]
        a = np.sin(dlat / 2.0) ** 2 + np.cos(lat)[:, None] * np.cos(lat)[None, :] * np.sin(dlon / 2.0) ** 2
        a = np.clip(a, 0.0, 1.0)
        d = 2.0 * EARTH_RADIUS_M * np.arcsin(np.sqrt(a))
    else:
        x = points.lons()
        y = points.lats()
        d = np.hypot(x[:, None] - x[None, :], y[:, None] - y[None, :])

    # Mirror the upper triangle so symmetry is exact at the bit level, not
    # merely up to rounding of the two evaluation orders.
    upper = np.triu(d, 1)
    d = upper + upper.T
    return DistanceMatrix(d=d, metric_kind=metric)


def tour_length(order: Sequence[int], matrix: DistanceMatrix) -> float:
    """Closed-cycle length: path edges in visit order, then the closing edge.

    The accumulation order is part of the contract: the RL trainer adds edge
    rewards in this exact order, which makes episode reward the exact negation
    of the value returned here.
    """
    n = matrix.n
    if n < 2:
        raise ValueError("tour length needs at least 2 points")
    validate_permutation(order, n)
    d = matrix.d
    total = 0.0
    for i in range(n - 1):
        total += float(d[order[i], order[i + 1]])
    total += float(d[order[n - 1], order[0]])
    return total


def gap_to_best(value: float, best: float) -> float:
    """Percent excess of value over the best in its cohort."""
    if best <= 0:
        raise ValueError(f"best must be positive, got {best}")
    return 100.0 * (value - best) / best


def make_tour(order: Sequence[int], matrix: DistanceMatrix) -> Tour:
    """Attach the recomputed length to an order."""
    return Tour(order=tuple(order), length_m=tour_length(order, matrix))


def held_karp(matrix: DistanceMatrix) -> Tour:
    """Provably optimal closed tour via the subset dynamic program.

    Supports 2 <= n <= 18 (the table is 2^n x n float64). h[mask][last] is the
    cheapest way to visit every city outside mask from `last` and return to
    city 0, for masks that contain city 0 and `last`. Reconstruction walks
    forward choosing the smallest-index city that attains the optimum at each
    step, then the orientation with the smaller second city is kept, so ties
    resolve to the lexicographically smallest order starting at index 0.
    """
    n = matrix.n
    if not (2 <= n <= HELD_KARP_MAX_N):
        raise ValueError(f"held_karp supports 2 <= n <= {HELD_KARP_MAX_N}, got {n}")
    if n == 2:
        return make_tour((0, 1), matrix)

    d = matrix.d
    full = (1 << n) - 1
    shifted = 1 << np.arange(n)
    h = np.full((1 << n, n), np.inf, dtype=np.float64)
    h[full, :] = d[:, 0]

    for mask in range(full - 1, 0, -1):
        if not mask & 1:
            continue
        unvisited = np.nonzero(~((mask >> np.arange(n)) & 1).astype(bool))[0]
        if unvisited.size == 0:
            continue
        members = np.nonzero(((mask >> np.arange(n)) & 1).astype(bool))[0]
        # h for each candidate continuation w, taken at the grown mask.
        cont = h[mask | shifted[unvisited], unvisited]
        cand = d[np.ix_(members, unvisited)] + cont[None, :]
        h[mask, members] = cand.min(axis=1)

    order = [0]
    mask = 1
    last = 0
    for _ in range(n - 1):
        target = h[mask, last]
        for w in range(n):
            if mask & (1 << w):
                continue
            if float(d[last, w]) + float(h[mask | (1 << w), w]) == float(target):
                order.append(w)
                mask |= 1 << w
                last = w
                break
        else:  # pragma: no cover - would indicate a broken DP table
            raise AssertionError("held_karp reconstruction found no attaining successor")

    if order[1] > order[-1]:
        order = [0] + order[:0:-1]
    return make_tour(order, matrix)
