import json

import pytest

from waypoint_tsp.core import GEOGRAPHIC, PLANAR, build_distance_matrix, held_karp
from waypoint_tsp.data import (
    DEFAULT_BBOX,
    BoundingBox,
    export_route,
    generate_dataset,
    grid_points,
    load_waypoints,
    quantize9,
    save_waypoints,
)


def test_generate_dataset_is_deterministic_and_in_bbox():
    a = generate_dataset(25, rng_seed=13)
    b = generate_dataset(25, rng_seed=13)
    assert [(p.lat, p.lon) for p in a] == [(p.lat, p.lon) for p in b]
    assert [(p.lat, p.lon) for p in a] != [(p.lat, p.lon) for p in generate_dataset(25, rng_seed=14)]
    for p in a:
        assert DEFAULT_BBOX.min_lat <= p.lat <= DEFAULT_BBOX.max_lat
        assert DEFAULT_BBOX.min_lon <= p.lon <= DEFAULT_BBOX.max_lon


def test_generated_coordinates_are_quantized():
    for p in generate_dataset(10, rng_seed=5):
        assert p.lat == quantize9(p.lat)
        assert p.lon == quantize9(p.lon)
        assert len(f"{p.lat:.9f}".split(".")[1]) == 9


def test_default_bbox_diagonal_under_4700m():
    from waypoint_tsp.core import Waypoint, WaypointSet

    corners = build_distance_matrix(
        WaypointSet(
            (
                Waypoint(0, DEFAULT_BBOX.min_lat, DEFAULT_BBOX.min_lon),
                Waypoint(1, DEFAULT_BBOX.max_lat, DEFAULT_BBOX.max_lon),
            )
        )
    )
    assert corners.d[0, 1] < 4700.0


def test_bbox_validation_and_clamp():
    with pytest.raises(ValueError):
        BoundingBox(1.0, 0.0, 0.0, 1.0)
    box = BoundingBox(0.0, 1.0, 0.0, 1.0)
    assert box.clamp(2.0, -3.0) == (1.0, 0.0)


def test_csv_round_trip(tmp_path):
    points = generate_dataset(12, rng_seed=3)
    path = tmp_path / "pts.csv"
    save_waypoints(points, str(path))
    text = path.read_text()
    assert text.startswith("id,lat,lon\n")
    assert text.endswith("\n")
    loaded = load_waypoints(str(path))
    assert loaded.kind == GEOGRAPHIC
    assert [(p.id, p.lat, p.lon) for p in loaded] == [(p.id, p.lat, p.lon) for p in points]
    # Saving the loaded set reproduces the bytes.
    path2 = tmp_path / "pts2.csv"
    save_waypoints(loaded, str(path2))
    assert path2.read_text() == text


def test_csv_errors_carry_line_numbers(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("id,lat,lon\n0,6.88,-8.09\n2,6.89,-8.08\n")
    with pytest.raises(ValueError, match="line 3"):
        load_waypoints(str(path))
    path.write_text("point,lat,lon\n")
    with pytest.raises(ValueError, match="header"):
        load_waypoints(str(path))
    path.write_text("id,lat,lon\n0,96.0,-8.09\n")
    with pytest.raises(ValueError, match="lat"):
        load_waypoints(str(path))
    path.write_text("id,lat,lon\n0,6.88\n")
    with pytest.raises(ValueError, match="line 2"):
        load_waypoints(str(path))


def test_geojson_round_trip(tmp_path):
    points = generate_dataset(6, rng_seed=8)
    doc = {
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "properties": {"id": p.id},
                "geometry": {"type": "Point", "coordinates": [p.lon, p.lat]},
            }
            for p in points
        ],
    }
    path = tmp_path / "pts.geojson"
    path.write_text(json.dumps(doc))
    loaded = load_waypoints(str(path))
    assert [(p.id, p.lat, p.lon) for p in loaded] == [(p.id, p.lat, p.lon) for p in points]


def test_geojson_rejects_non_points(tmp_path):
    doc = {
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "properties": {},
                "geometry": {"type": "LineString", "coordinates": [[0, 0], [1, 1]]},
            }
        ],
    }
    path = tmp_path / "bad.geojson"
    path.write_text(json.dumps(doc))
    with pytest.raises(ValueError, match="Point"):
        load_waypoints(str(path))


def test_load_infers_format_from_extension(tmp_path):
    points = generate_dataset(4, rng_seed=1)
    csv_path = tmp_path / "a.csv"
    save_waypoints(points, str(csv_path))
    assert len(load_waypoints(str(csv_path))) == 4
    with pytest.raises(ValueError, match="format"):
        load_waypoints(str(tmp_path / "a.dat"))


def test_grid_points_row_major_cell_centers():
    box = BoundingBox(0.0, 1.0, 0.0, 1.0, kind=PLANAR)
    pts = grid_points(box, rows=2, cols=3)
    assert len(pts) == 6
    assert pts.kind == PLANAR
    # Row-major: lon (x) varies fastest.
    lons = [p.lon for p in pts]
    lats = [p.lat for p in pts]
    assert lons[:3] == lons[3:]
    assert lats[0] == lats[1] == lats[2]
    assert lats[0] != lats[3]
    for p in pts:
        assert 0.0 < p.lat < 1.0 and 0.0 < p.lon < 1.0


def test_grid_points_validation():
    box = BoundingBox(0.0, 1.0, 0.0, 1.0, kind=PLANAR)
    with pytest.raises(ValueError):
        grid_points(box, rows=0, cols=3)


def test_export_route_schema(tmp_path):
    points = generate_dataset(5, rng_seed=2)
    matrix = build_distance_matrix(points)
    tour = held_karp(matrix)
    path = tmp_path / "route.json"
    export_route(tour, points, str(path))
    doc = json.loads(path.read_text())
    assert set(doc) == {"length_m", "route"}
    assert doc["length_m"] == tour.length_m
    assert [w["id"] for w in doc["route"]] == list(tour.order)
    assert set(doc["route"][0]) == {"id", "lat", "lon"}
    assert path.read_text().endswith("\n")
