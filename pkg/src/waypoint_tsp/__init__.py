"""Waypoint route planning: closed-tour construction heuristics, local-search
metaheuristics, tabular Q-learning, toy landscape walks, a benchmark harness,
a CLI, and an HTTP planning service.

The HTTP layer lives in waypoint_tsp.service and is imported lazily to keep
library imports light.
"""

from . import bench, construct, data, landscape, localsearch, methods, rl
from .core import (
    EARTH_RADIUS_M,
    DistanceMatrix,
    RunResult,
    SolveTrace,
    Tour,
    Waypoint,
    WaypointSet,
    build_distance_matrix,
    gap_to_best,
    held_karp,
    make_tour,
    tour_length,
)
from .methods import UnknownMethodError, solve

__version__ = "0.1.0"

__all__ = [
    "EARTH_RADIUS_M",
    "DistanceMatrix",
    "RunResult",
    "SolveTrace",
    "Tour",
    "UnknownMethodError",
    "Waypoint",
    "WaypointSet",
    "bench",
    "build_distance_matrix",
    "construct",
    "data",
    "gap_to_best",
    "held_karp",
    "landscape",
    "localsearch",
    "make_tour",
    "methods",
    "rl",
    "solve",
    "tour_length",
]
