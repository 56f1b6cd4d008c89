"""First-solution tour constructions and spanning-tree machinery.

Every function here is deterministic: ties are broken by lowest index (or
lowest index pair), so identical inputs always give identical tours.
"""

from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .core import DistanceMatrix, Tour, make_tour

MATCHING_MAX_ODD = 18
TRIANGLE_CHECK_MAX_N = 256

SELECTORS = ("nearest", "farthest", "cheapest")
SCOPES = ("sequential", "parallel")


@dataclass(frozen=True)
class SpanningTree:
    """A spanning tree as (i, j, weight_m) edges plus their exact fsum weight."""

    edges: tuple[tuple[int, int, float], ...]
    total_weight_m: float

    def __post_init__(self):
        parent = {}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for i, j, _ in self.edges:
            parent.setdefault(i, i)
            parent.setdefault(j, j)
            ri, rj = find(i), find(j)
            if ri == rj:
                raise ValueError("spanning tree edges contain a cycle")
            parent[ri] = rj
        if self.edges and len(parent) != len(self.edges) + 1:
            raise ValueError("spanning tree edges are not connected")
        if self.total_weight_m != math.fsum(w for _, _, w in self.edges):
            raise ValueError("total_weight_m does not equal the sum of edge weights")


@dataclass(frozen=True)
class InsertionStrategy:
    """How insertion picks the next city (selector) and where it grows from (scope).

    scope=sequential grows from a caller-chosen start vertex; scope=parallel
    seeds from the globally cheapest edge instead. In both scopes every
    remaining city is evaluated each round against the whole partial tour.
    """

    selector: str = "cheapest"
    scope: str = "sequential"

    def __post_init__(self):
        if self.selector not in SELECTORS:
            raise ValueError(f"unknown selector {self.selector!r}, expected one of {SELECTORS}")
        if self.scope not in SCOPES:
            raise ValueError(f"unknown scope {self.scope!r}, expected one of {SCOPES}")


def nearest_neighbor(matrix: DistanceMatrix, start: int = 0) -> Tour:
    """Repeatedly hop to the closest unvisited city; ties go to the lowest index."""
    n = matrix.n
    if not 0 <= start < n:
        raise ValueError(f"start {start} out of range for {n} points")
    d = matrix.d
    visited = np.zeros(n, dtype=bool)
    visited[start] = True
    order = [start]
    current = start
    for _ in range(n - 1):
        row = d[current].copy()
        row[visited] = np.inf
        nxt = int(np.argmin(row))  # argmin takes the first minimum: lowest index
        visited[nxt] = True
        order.append(nxt)
        current = nxt
    return make_tour(order, matrix)


def greedy_edge(matrix: DistanceMatrix) -> Tour:
    """Accept globally cheapest edges while no vertex exceeds degree 2 and no
    cycle forms early; the surviving Hamiltonian path is closed at the end."""
    n = matrix.n
    if n < 3:
        raise ValueError("greedy_edge needs at least 3 points")
    d = matrix.d
    iu, ju = np.triu_indices(n, 1)
    edge_order = np.lexsort((ju, iu, d[iu, ju]))  # by (weight, i, j)

    parent = list(range(n))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    degree = [0] * n
    adjacency = [[] for _ in range(n)]
    accepted = 0
    for k in edge_order:
        if accepted == n - 1:
            break
        i, j = int(iu[k]), int(ju[k])
        if degree[i] == 2 or degree[j] == 2:
            continue
        ri, rj = find(i), find(j)
        if ri == rj:
            continue
        parent[ri] = rj
        degree[i] += 1
        degree[j] += 1
        adjacency[i].append(j)
        adjacency[j].append(i)
        accepted += 1

    ends = [v for v in range(n) if degree[v] == 1]
    adjacency[ends[0]].append(ends[1])
    adjacency[ends[1]].append(ends[0])

    order = [0]
    prev = -1
    current = 0
    for _ in range(n - 1):
        nxt = adjacency[current][0] if adjacency[current][0] != prev else adjacency[current][1]
        order.append(nxt)
        prev, current = current, nxt
    return make_tour(order, matrix)


def _splice_position(cycle: list[int], city: int, d: np.ndarray) -> tuple[float, int]:
    """Cheapest place to insert city into the cycle: (delta, position after index)."""
    cyc = np.asarray(cycle)
    nxt = np.roll(cyc, -1)
    deltas = (d[cyc, city] + d[city, nxt]) - d[cyc, nxt]
    k = int(np.argmin(deltas))
    return float(deltas[k]), k


def insertion(matrix: DistanceMatrix, strategy: InsertionStrategy | None = None, start: int = 0) -> Tour:
    """Grow a cycle by splicing one city per round at its cheapest position.

    The selector decides which city enters next: nearest/farthest by distance
    to the current cycle, cheapest by smallest insertion cost increase.
    """
    if strategy is None:
        strategy = InsertionStrategy()
    n = matrix.n
    if n < 3:
        raise ValueError("insertion needs at least 3 points")
    if not 0 <= start < n:
        raise ValueError(f"start {start} out of range for {n} points")
    d = matrix.d

    if strategy.scope == "parallel":
        iu, ju = np.triu_indices(n, 1)
        k = int(np.lexsort((ju, iu, d[iu, ju]))[0])
        cycle = [int(iu[k]), int(ju[k])]
    else:
        row = d[start].copy()
        row[start] = np.inf if strategy.selector != "farthest" else -np.inf
        partner = int(np.argmin(row)) if strategy.selector != "farthest" else int(np.argmax(row))
        cycle = [start, partner]

    in_cycle = np.zeros(n, dtype=bool)
    in_cycle[cycle] = True
    # Distance from each outside city to the nearest cycle member, kept fresh.
    mind = np.minimum(d[:, cycle[0]], d[:, cycle[1]])

    while len(cycle) < n:
        if strategy.selector == "cheapest":
            cyc = np.asarray(cycle)
            nxt = np.roll(cyc, -1)
            cand = np.nonzero(~in_cycle)[0]
            deltas = d[np.ix_(cand, cyc)] + d[np.ix_(cand, nxt)] - d[cyc, nxt][None, :]
            flat = int(np.argmin(deltas))  # first minimum: lowest city, then earliest slot
            city = int(cand[flat // len(cycle)])
            pos = flat % len(cycle)
        else:
            scored = mind.copy()
            if strategy.selector == "nearest":
                scored[in_cycle] = np.inf
                city = int(np.argmin(scored))
            else:
                scored[in_cycle] = -np.inf
                city = int(np.argmax(scored))
            _, pos = _splice_position(cycle, city, d)
        cycle.insert(pos + 1, city)
        in_cycle[city] = True
        mind = np.minimum(mind, d[:, city])

    return make_tour(cycle, matrix)


def savings(matrix: DistanceMatrix, depot: int = 0) -> Tour:
    """Clarke-Wright merges, adapted to a single closed tour through the depot.

    Route fragments (paths of non-depot cities) merge endpoint-to-endpoint in
    descending savings order s(i,j) = d(depot,i) + d(depot,j) - d(i,j) until
    one path remains; the depot then closes it into a cycle.
    """
    n = matrix.n
    if n < 3:
        raise ValueError("savings needs at least 3 points")
    if not 0 <= depot < n:
        raise ValueError(f"depot {depot} out of range for {n} points")
    d = matrix.d

    customers = [v for v in range(n) if v != depot]
    pairs = []
    for a_i, i in enumerate(customers):
        for j in customers[a_i + 1:]:
            s = float(d[depot, i]) + float(d[depot, j]) - float(d[i, j])
            pairs.append((-s, i, j))
    pairs.sort()

    fragment_of = {c: c for c in customers}     # endpoint city -> fragment key
    fragments = {c: [c] for c in customers}     # fragment key -> path

    for _, i, j in pairs:
        if len(fragments) == 1:
            break
        fi = fragment_of.get(i)
        fj = fragment_of.get(j)
        if fi is None or fj is None or fi == fj:
            continue
        a, b = fragments[fi], fragments[fj]
        if a[0] == i:
            a.reverse()
        if b[-1] == j:
            b.reverse()
        # now a ends with i and b starts with j
        merged = a + b
        for key in (fi, fj):
            del fragments[key]
        for endpoint in (a[0], i, j, b[-1]):
            fragment_of.pop(endpoint, None)
        fragments[merged[0]] = merged
        fragment_of[merged[0]] = merged[0]
        fragment_of[merged[-1]] = merged[0]

    path = next(iter(fragments.values()))
    return make_tour([depot] + path, matrix)


def mst_prim(matrix: DistanceMatrix, root: int = 0) -> SpanningTree:
    """Minimum spanning tree; edge ties resolve to the lowest (i, j) pair."""
    n = matrix.n
    if n < 2:
        raise ValueError("a spanning tree needs at least 2 points")
    if not 0 <= root < n:
        raise ValueError(f"root {root} out of range for {n} points")
    d = matrix.d

    in_tree = np.zeros(n, dtype=bool)
    in_tree[root] = True
    key = d[root].copy()
    key[root] = np.inf
    parent = np.full(n, root)

    edges = []
    for _ in range(n - 1):
        masked = key.copy()
        masked[in_tree] = np.inf
        v = int(np.argmin(masked))
        u = int(parent[v])
        edges.append((min(u, v), max(u, v), float(d[u, v])))
        in_tree[v] = True
        row = d[v]
        better = ~in_tree & ((row < key) | ((row == key) & (v < parent)))
        key[better] = row[better]
        parent[better] = v

    edges.sort()
    return SpanningTree(edges=tuple(edges), total_weight_m=math.fsum(w for _, _, w in edges))


def _euler_circuit(adjacency: list[Counter], start: int) -> list[int]:
    """Hierholzer walk over an even-degree connected multigraph; the smallest
    available neighbor is taken first so the circuit is deterministic."""
    stack = [start]
    circuit = []
    while stack:
        v = stack[-1]
        nxt = None
        for w in sorted(adjacency[v]):
            if adjacency[v][w] > 0:
                nxt = w
                break
        if nxt is None:
            circuit.append(stack.pop())
        else:
            adjacency[v][nxt] -= 1
            adjacency[nxt][v] -= 1
            stack.append(nxt)
    circuit.reverse()
    return circuit


def _shortcut(walk: list[int], matrix: DistanceMatrix) -> Tour:
    seen = set()
    order = []
    for v in walk:
        if v not in seen:
            seen.add(v)
            order.append(v)
    return make_tour(order, matrix)


def double_tree(matrix: DistanceMatrix) -> Tour:
    """Double every MST edge, walk the Euler circuit, shortcut repeats.

    On metric inputs the result is at most twice the optimal cycle because the
    doubled tree weighs 2*MST and shortcuts never lengthen the walk.
    """
    n = matrix.n
    if n < 3:
        raise ValueError("double_tree needs at least 3 points")
    tree = mst_prim(matrix, 0)
    adjacency = [Counter() for _ in range(n)]
    for i, j, _ in tree.edges:
        adjacency[i][j] += 2
        adjacency[j][i] += 2
    walk = _euler_circuit(adjacency, 0)
    return _shortcut(walk, matrix)


def _check_metric(d: np.ndarray) -> None:
    n = d.shape[0]
    if not np.array_equal(d, d.T):
        raise ValueError("distance matrix must be symmetric")
    if n > TRIANGLE_CHECK_MAX_N:
        # O(n^3) scan is too slow past this size; trust the caller's metric.
        return
    best = np.full_like(d, np.inf)
    for k in range(n):
        np.minimum(best, d[:, [k]] + d[[k], :], out=best)
    if np.any(d > best * (1.0 + 1e-6)):
        warnings.warn(
            "triangle inequality violated beyond 1e-6 relative; the 1.5x bound is not guaranteed",
            RuntimeWarning,
            stacklevel=3,
        )


def _exact_min_matching(weights: np.ndarray) -> list[tuple[int, int]]:
    """Minimum-weight perfect matching by subset DP, O(2^k * k^2) for k points."""
    k = weights.shape[0]
    full = (1 << k) - 1
    memo = np.full(1 << k, np.inf, dtype=np.float64)
    memo[0] = 0.0
    for mask in range(1, full + 1):
        if bin(mask).count("1") % 2:
            continue
        i = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << i)
        js = []
        m = rest
        while m:
            j = (m & -m).bit_length() - 1
            js.append(j)
            m ^= 1 << j
        cand = memo[[mask ^ (1 << i) ^ (1 << j) for j in js]] + weights[i, js]
        memo[mask] = cand.min()

    pairs = []
    mask = full
    while mask:
        i = (mask & -mask).bit_length() - 1
        target = float(memo[mask])
        m = mask ^ (1 << i)
        while m:
            j = (m & -m).bit_length() - 1
            m ^= 1 << j
            if float(memo[mask ^ (1 << i) ^ (1 << j)]) + float(weights[i, j]) == target:
                pairs.append((i, j))
                mask ^= (1 << i) | (1 << j)
                break
        else:  # pragma: no cover - would indicate a broken DP table
            raise AssertionError("matching reconstruction found no attaining pair")
    return pairs


def _greedy_matching(weights: np.ndarray) -> list[tuple[int, int]]:
    k = weights.shape[0]
    candidates = sorted(
        (float(weights[i, j]), i, j) for i in range(k) for j in range(i + 1, k)
    )
    matched = [False] * k
    pairs = []
    for _, i, j in candidates:
        if not matched[i] and not matched[j]:
            matched[i] = matched[j] = True
            pairs.append((i, j))
    return pairs


def christofides(matrix: DistanceMatrix, allow_greedy_fallback: bool = False) -> Tour:
    """MST + odd-vertex matching + Euler shortcut; at most 1.5x optimal.

    The matching is exact (subset DP) while the odd-degree set has at most
    MATCHING_MAX_ODD vertices. Larger odd sets need allow_greedy_fallback,
    which substitutes a cheapest-pair-first matching and voids the 1.5 bound.
    """
    n = matrix.n
    if n < 3:
        raise ValueError("christofides needs at least 3 points")
    _check_metric(matrix.d)

    tree = mst_prim(matrix, 0)
    degree = [0] * n
    for i, j, _ in tree.edges:
        degree[i] += 1
        degree[j] += 1
    odd = [v for v in range(n) if degree[v] % 2]

    adjacency = [Counter() for _ in range(n)]
    for i, j, _ in tree.edges:
        adjacency[i][j] += 1
        adjacency[j][i] += 1

    if odd:
        weights = matrix.d[np.ix_(odd, odd)]
        if len(odd) <= MATCHING_MAX_ODD:
            pairs = _exact_min_matching(weights)
        elif allow_greedy_fallback:
            pairs = _greedy_matching(weights)
        else:
            raise ValueError(
                f"odd-degree set has {len(odd)} vertices, beyond the exact matching "
                f"bound {MATCHING_MAX_ODD}; pass allow_greedy_fallback=True to continue "
                "without the 1.5x guarantee"
            )
        for a, b in pairs:
            adjacency[odd[a]][odd[b]] += 1
            adjacency[odd[b]][odd[a]] += 1

    walk = _euler_circuit(adjacency, 0)
    return _shortcut(walk, matrix)


def one_tree_bound(matrix: DistanceMatrix, excluded: int | None = 0) -> float:
    """Lower bound on the optimal cycle: MST over the rest plus the excluded
    vertex's two cheapest edges. excluded=None takes the strongest bound over
    every choice of excluded vertex."""
    n = matrix.n
    if n < 3:
        raise ValueError("one_tree_bound needs at least 3 points")
    if excluded is None:
        return max(one_tree_bound(matrix, v) for v in range(n))
    if not 0 <= excluded < n:
        raise ValueError(f"excluded {excluded} out of range for {n} points")

    others = [v for v in range(n) if v != excluded]
    sub = DistanceMatrix(d=matrix.d[np.ix_(others, others)], metric_kind=matrix.metric_kind)
    tree = mst_prim(sub, 0)
    incident = sorted(float(matrix.d[excluded, v]) for v in others)
    return math.fsum([w for _, _, w in tree.edges] + incident[:2])
