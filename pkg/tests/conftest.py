import pytest

from waypoint_tsp.core import PLANAR, Waypoint, WaypointSet, build_distance_matrix
from waypoint_tsp.data import generate_dataset


@pytest.fixture
def make_planar():
    """Factory: list of (x, y) meter coordinates -> planar DistanceMatrix."""

    def _make(coords):
        pts = tuple(Waypoint(i, float(y), float(x)) for i, (x, y) in enumerate(coords))
        return build_distance_matrix(WaypointSet(pts, kind=PLANAR))

    return _make


@pytest.fixture
def square(make_planar):
    # Unit square in meters; the optimal cycle has length exactly 4.0.
    return make_planar([(0, 0), (1, 0), (1, 1), (0, 1)])


@pytest.fixture
def geo12():
    return build_distance_matrix(generate_dataset(12, rng_seed=7))
