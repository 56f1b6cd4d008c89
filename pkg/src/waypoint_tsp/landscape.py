"""Grid-agent study of local vs global optima on two toy surfaces.

An agent walks a [-1, 1]^2 square in fixed 0.05 steps, maximizing either a
single-peak bowl or a multi-peak cosine surface whose global maximum (0) sits
at the origin. Hill climbing takes the best of the 8 compass moves until none
improves; simulated annealing proposes one random move per iteration and
sometimes accepts downhill steps, with geometrically cooling temperature.

Positions are held as integer grid indices and converted to coordinates by a
single multiplication, so every visited coordinate is bit-reproducible (for
example 20 * 0.05 is exactly 1.0 in doubles).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Optional

from .ioutil import atomic_write_text

STEP = 0.05
GRID_MAX = 20  # index range [-20, 20] spans the [-1, 1] domain
SNAP_TOL = 1e-9

# Compass moves in the fixed tie-break order, as (dx1, dx2) index deltas.
MOVES = (
    ("N", 0, 1),
    ("S", 0, -1),
    ("E", 1, 0),
    ("W", -1, 0),
    ("NE", 1, 1),
    ("NW", -1, 1),
    ("SE", 1, -1),
    ("SW", -1, -1),
)

LANDSCAPE_KINDS = ("single_peak", "multi_peak")


def _check_domain(x1: float, x2: float) -> None:
    if not (-1.0 <= x1 <= 1.0 and -1.0 <= x2 <= 1.0):
        raise ValueError(f"position ({x1}, {x2}) outside the [-1, 1]^2 domain")


def objective_single(x1: float, x2: float) -> float:
    """Concave bowl -(x1^2 + x2^2); unique maximum 0 at the origin."""
    _check_domain(x1, x2)
    return -(x1 * x1 + x2 * x2)


def objective_multi(x1: float, x2: float) -> float:
    """Cosine-rippled bowl with many local maxima; global maximum 0 at the
    origin, where the two 0.1*cos terms cancel the 0.2 offset exactly."""
    _check_domain(x1, x2)
    return -(0.2 + x1 * x1 + x2 * x2
             - 0.1 * math.cos(6.0 * math.pi * x1)
             - 0.1 * math.cos(6.0 * math.pi * x2))


@dataclass(frozen=True)
class Landscape:
    kind: str
    objective: Callable[[float, float], float]


def get_landscape(kind: str) -> Landscape:
    name = {"single": "single_peak", "multi": "multi_peak"}.get(kind, kind)
    if name == "single_peak":
        return Landscape("single_peak", objective_single)
    if name == "multi_peak":
        return Landscape("multi_peak", objective_multi)
    raise ValueError(f"unknown landscape kind {kind!r}, expected one of {LANDSCAPE_KINDS}")


def snap_to_grid(value: float) -> int:
    """Map a coordinate to its grid index, rejecting off-grid or out-of-domain
    values; the tolerance only absorbs decimal-literal rounding."""
    idx = round(value / STEP)
    if abs(idx * STEP - value) > SNAP_TOL:
        raise ValueError(f"{value} is not on the 0.05 grid")
    if abs(idx) > GRID_MAX:
        raise ValueError(f"{value} is outside the [-1, 1] domain")
    return idx


@dataclass(frozen=True)
class WalkStep:
    """One recorded state of a walk. proposal_delta is the objective change of
    the move proposed this iteration (None for the initial record and for hill
    climbing); it is not part of the CSV export."""

    iteration: int
    x1: float
    x2: float
    objective: float
    temperature: Optional[float] = None
    acceptance_prob: Optional[float] = None
    proposal_delta: Optional[float] = None


@dataclass
class WalkTrace:
    kind: str  # "hc" or "sa"
    landscape: str
    steps: list[WalkStep] = field(default_factory=list)

    @property
    def final(self) -> WalkStep:
        return self.steps[-1]

    def to_csv(self) -> str:
        lines = ["iteration,x1,x2,objective,temperature,acceptance_prob"]
        for s in self.steps:
            t = "" if s.temperature is None else repr(s.temperature)
            p = "" if s.acceptance_prob is None else repr(s.acceptance_prob)
            lines.append(f"{s.iteration},{s.x1!r},{s.x2!r},{s.objective!r},{t},{p}")
        return "\n".join(lines) + "\n"

    def save(self, path: str) -> None:
        atomic_write_text(path, self.to_csv())


def _admissible(i1: int, i2: int) -> list[tuple[int, int]]:
    out = []
    for _, dx1, dx2 in MOVES:
        j1, j2 = i1 + dx1, i2 + dx2
        if abs(j1) <= GRID_MAX and abs(j2) <= GRID_MAX:
            out.append((j1, j2))
    return out


def hc_walk(landscape: Landscape, start: tuple[float, float], max_iters: int = 5000) -> WalkTrace:
    """Best-of-8 strict ascent from start; stops at the first grid point where
    no admissible move increases the objective."""
    if max_iters < 0:
        raise ValueError("max_iters must be nonnegative")
    i1, i2 = snap_to_grid(start[0]), snap_to_grid(start[1])
    obj = landscape.objective(i1 * STEP, i2 * STEP)
    trace = WalkTrace("hc", landscape.kind)
    trace.steps.append(WalkStep(0, i1 * STEP, i2 * STEP, obj))

    for k in range(1, max_iters + 1):
        best = None
        for j1, j2 in _admissible(i1, i2):
            cand = landscape.objective(j1 * STEP, j2 * STEP)
            if cand > obj and (best is None or cand > best[0]):
                best = (cand, j1, j2)
        if best is None:
            break
        obj, i1, i2 = best
        trace.steps.append(WalkStep(k, i1 * STEP, i2 * STEP, obj))

    return trace


def sa_walk(
    landscape: Landscape,
    start: tuple[float, float],
    t0: float = 1.0,
    alpha: float = 0.99,
    rng_seed: int = 0,
    max_iters: int = 5000,
) -> WalkTrace:
    """One uniformly random admissible proposal per iteration; downhill moves
    accepted with probability e^(delta/T). Every iteration is recorded with
    the temperature and probability that governed it."""
    if not t0 > 0:
        raise ValueError(f"t0 must be positive, got {t0}")
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if max_iters < 0:
        raise ValueError("max_iters must be nonnegative")
    i1, i2 = snap_to_grid(start[0]), snap_to_grid(start[1])
    obj = landscape.objective(i1 * STEP, i2 * STEP)
    rng = random.Random(rng_seed)
    trace = WalkTrace("sa", landscape.kind)
    trace.steps.append(WalkStep(0, i1 * STEP, i2 * STEP, obj, temperature=t0, acceptance_prob=1.0))

    for k in range(1, max_iters + 1):
        temperature = t0 * alpha ** k
        options = _admissible(i1, i2)
        j1, j2 = options[rng.randrange(len(options))]
        cand = landscape.objective(j1 * STEP, j2 * STEP)
        delta = cand - obj
        if delta >= 0:
            prob = 1.0
            accept = True
        else:
            # temperature underflows to 0.0 on very long runs; frozen means
            # no downhill move is ever taken.
            prob = math.exp(delta / temperature) if temperature > 0.0 else 0.0
            accept = rng.random() < prob
        if accept:
            i1, i2, obj = j1, j2, cand
        trace.steps.append(WalkStep(
            k, i1 * STEP, i2 * STEP, obj,
            temperature=temperature, acceptance_prob=prob, proposal_delta=delta,
        ))

    return trace
