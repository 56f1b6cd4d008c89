"""HTTP API behavior, exercised through an in-process test client."""

import math

import pytest
from fastapi.testclient import TestClient

from waypoint_tsp.methods import CANONICAL_IDS
from waypoint_tsp.service import create_app

SQUARE_POINTS = [
    {"lat": 0.0, "lon": 0.0},
    {"lat": 0.0, "lon": 1.0},
    {"lat": 1.0, "lon": 1.0},
    {"lat": 1.0, "lon": 0.0},
]


@pytest.fixture()
def client():
    with TestClient(create_app()) as c:
        yield c


def solve_body(**overrides):
    body = {"points": SQUARE_POINTS, "method": "nn", "metric": "euclidean"}
    body.update(overrides)
    return body


class TestHealthAndCatalog:
    def test_healthz(self, client):
        resp = client.get("/healthz")
        assert resp.status_code == 200
        assert resp.text == "ok"

    def test_methods_catalog(self, client):
        resp = client.get("/api/methods")
        assert resp.status_code == 200
        entries = resp.json()
        assert [e["id"] for e in entries] == list(CANONICAL_IDS)
        for entry in entries:
            assert set(entry) == {"id", "label", "kind", "stochastic", "params"}
        by_id = {e["id"]: e for e in entries}
        assert by_id["sa"]["stochastic"] is True
        assert by_id["held_karp"]["kind"] == "exact"


class TestSolve:
    def test_unit_square(self, client):
        resp = client.post("/api/solve", json=solve_body())
        assert resp.status_code == 200
        body = resp.json()
        assert body["method"] == "nn"
        assert body["seed"] == 0
        assert body["length_m"] == pytest.approx(4.0)
        assert sorted(body["order"]) == [0, 1, 2, 3]
        assert body["elapsed_ms"] >= 0.0
        assert "trace" not in body

    def test_custom_ids_round_trip(self, client):
        points = [
            {"id": 40, "lat": 0.0, "lon": 0.0},
            {"id": 7, "lat": 0.0, "lon": 1.0},
            {"id": 19, "lat": 1.0, "lon": 1.0},
            {"id": 23, "lat": 1.0, "lon": 0.0},
        ]
        resp = client.post("/api/solve", json=solve_body(points=points))
        assert resp.status_code == 200
        assert sorted(resp.json()["order"]) == [7, 19, 23, 40]

    def test_include_trace(self, client):
        resp = client.post(
            "/api/solve",
            json=solve_body(method="sa", seed=3, include_trace=True,
                            params={"t0": 1.0, "alpha": 0.99}),
        )
        assert resp.status_code == 200
        trace = resp.json()["trace"]
        assert len(trace) >= 1
        assert all(len(pair) == 2 for pair in trace)
        costs = [c for _, c in trace]
        assert costs == sorted(costs, reverse=True)

    def test_haversine_default_metric(self, client):
        points = [
            {"lat": 47.61, "lon": -122.33},
            {"lat": 47.62, "lon": -122.35},
            {"lat": 47.60, "lon": -122.32},
        ]
        resp = client.post("/api/solve", json={"points": points, "method": "held_karp"})
        assert resp.status_code == 200
        length = resp.json()["length_m"]
        assert 1000.0 < length < 20000.0 and math.isfinite(length)

    def test_single_point_rejected(self, client):
        resp = client.post("/api/solve", json=solve_body(points=[{"lat": 0.0, "lon": 0.0}]))
        assert resp.status_code == 400

    def test_extra_field_rejected(self, client):
        resp = client.post("/api/solve", json=solve_body(mode="fast"))
        assert resp.status_code == 400
        detail = resp.json()["detail"]
        assert any("mode" in err["loc"] for err in detail)

    def test_unknown_method_names_valid_ones(self, client):
        resp = client.post("/api/solve", json=solve_body(method="warp_drive"))
        assert resp.status_code == 422
        body = resp.json()
        assert "warp_drive" in body["detail"]
        assert set(body["valid_methods"]) == set(CANONICAL_IDS)

    def test_unknown_param_rejected(self, client):
        resp = client.post("/api/solve", json=solve_body(params={"tenure": 5}))
        assert resp.status_code == 400
        assert "tenure" in resp.json()["detail"]

    def test_duplicate_ids_rejected(self, client):
        points = [
            {"id": 1, "lat": 0.0, "lon": 0.0},
            {"id": 1, "lat": 0.0, "lon": 1.0},
            {"id": 2, "lat": 1.0, "lon": 1.0},
        ]
        resp = client.post("/api/solve", json=solve_body(points=points))
        assert resp.status_code == 400
        assert "unique" in resp.json()["detail"]

    def test_out_of_range_latitude_rejected(self, client):
        points = [{"lat": 95.0, "lon": 0.0}, {"lat": 0.0, "lon": 1.0}]
        resp = client.post("/api/solve", json={"points": points, "method": "nn"})
        assert resp.status_code == 400
        assert "latitude" in resp.json()["detail"]

    def test_exhausted_budget_times_out(self, client):
        rng_points = [{"lat": float(i % 10), "lon": float(i // 10)} for i in range(60)]
        resp = client.post(
            "/api/solve",
            json=solve_body(points=rng_points, method="ql", time_budget_ms=0.001),
        )
        assert resp.status_code == 408

    def test_budget_over_cap_rejected(self, client):
        resp = client.post("/api/solve", json=solve_body(time_budget_ms=120_000.0))
        assert resp.status_code == 400

    def test_identical_requests_identical_tours(self, client):
        body = solve_body(method="sa", seed=9, params={"t0": 2.0, "alpha": 0.95})
        first = client.post("/api/solve", json=body).json()
        second = client.post("/api/solve", json=body).json()
        assert first["order"] == second["order"]
        assert first["length_m"] == second["length_m"]


class TestGrid:
    def test_geographic_grid(self, client):
        resp = client.post("/api/grid", json={
            "bbox": {"min_lat": 47.0, "max_lat": 47.1, "min_lon": 8.0, "max_lon": 8.1},
            "rows": 3, "cols": 4,
        })
        assert resp.status_code == 200
        body = resp.json()
        assert body["kind"] == "geographic"
        assert len(body["points"]) == 12
        assert [p["id"] for p in body["points"]] == list(range(12))
        for p in body["points"]:
            assert 47.0 < p["lat"] < 47.1
            assert 8.0 < p["lon"] < 8.1

    def test_planar_grid(self, client):
        resp = client.post("/api/grid", json={
            "bbox": {"min_x": 0.0, "max_x": 100.0, "min_y": 0.0, "max_y": 50.0},
            "rows": 2, "cols": 2,
        })
        assert resp.status_code == 200
        assert resp.json()["kind"] == "planar"

    def test_mixed_bbox_keys_rejected(self, client):
        resp = client.post("/api/grid", json={
            "bbox": {"min_lat": 47.0, "max_lat": 47.1, "min_x": 0.0, "max_x": 1.0},
            "rows": 2, "cols": 2,
        })
        assert resp.status_code == 400

    def test_oversized_grid_rejected(self, client):
        resp = client.post("/api/grid", json={
            "bbox": {"min_lat": 47.0, "max_lat": 47.1, "min_lon": 8.0, "max_lon": 8.1},
            "rows": 50, "cols": 50,
        })
        assert resp.status_code == 400
        assert "2000" in resp.json()["detail"]


class TestStaticAndCors:
    def test_fallback_page_without_bundle(self, client):
        resp = client.get("/")
        assert resp.status_code == 200
        assert "planning service" in resp.text
        assert "/api/solve" in resp.text

    def test_serves_bundle_when_present(self, tmp_path):
        (tmp_path / "index.html").write_text("<html><body>bundled ui</body></html>")
        with TestClient(create_app(static_dir=str(tmp_path))) as c:
            resp = c.get("/")
            assert resp.status_code == 200
            assert "bundled ui" in resp.text
            assert c.get("/healthz").text == "ok"

    def test_cors_headers_when_enabled(self):
        app = create_app(cors_origins=["http://example.com"])
        with TestClient(app) as c:
            resp = c.get("/healthz", headers={"Origin": "http://example.com"})
            assert resp.headers.get("access-control-allow-origin") == "http://example.com"
