"""HTTP planning service: JSON solve/grid/methods endpoints plus the static
UI bundle.

Stateless by design: every request carries its full input, no solve mutates
server state, and identical bodies get identical answers (modulo wall-clock
fields). A semaphore caps simultaneous heavy solves; excess requests wait
their turn.
"""

from __future__ import annotations

import asyncio
import os
from typing import Any, Optional

from fastapi import FastAPI, HTTPException, Request
from fastapi.concurrency import run_in_threadpool
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict, Field, field_validator

from . import methods
from .core import GEOGRAPHIC, PLANAR, Waypoint, WaypointSet, build_distance_matrix
from .data import BoundingBox, grid_points
from .rl import BudgetExhaustedError

MAX_POINTS = 2000
MAX_BUDGET_MS = 60_000.0
MAX_GRID_POINTS = 2000

_FALLBACK_PAGE = """<!doctype html>
<html><head><meta charset="utf-8"><title>waypoint-tsp service</title></head>
<body>
<h1>waypoint-tsp planning service</h1>
<p>The web UI bundle is not installed. The JSON API is live:</p>
<ul>
<li><code>GET /api/methods</code></li>
<li><code>POST /api/solve</code></li>
<li><code>POST /api/grid</code></li>
<li><code>GET /healthz</code></li>
</ul>
</body></html>
"""


class PointIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: Optional[int] = None
    lat: float
    lon: float


class SolveRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    points: list[PointIn] = Field(min_length=2, max_length=MAX_POINTS)
    method: str
    seed: int = 0
    time_budget_ms: Optional[float] = Field(default=None, gt=0, le=MAX_BUDGET_MS)
    params: dict[str, Any] = Field(default_factory=dict)
    include_trace: bool = False
    metric: str = "haversine"

    @field_validator("metric")
    @classmethod
    def _known_metric(cls, value: str) -> str:
        if value not in ("haversine", "euclidean"):
            raise ValueError("metric must be 'haversine' or 'euclidean'")
        return value


class BBoxIn(BaseModel):
    """Either the four geographic keys or the four planar keys, not a mix."""

    model_config = ConfigDict(extra="forbid")

    min_lat: Optional[float] = None
    max_lat: Optional[float] = None
    min_lon: Optional[float] = None
    max_lon: Optional[float] = None
    min_x: Optional[float] = None
    max_x: Optional[float] = None
    min_y: Optional[float] = None
    max_y: Optional[float] = None

    def to_bbox(self) -> BoundingBox:
        geo = (self.min_lat, self.max_lat, self.min_lon, self.max_lon)
        planar = (self.min_x, self.max_x, self.min_y, self.max_y)
        have_geo = all(v is not None for v in geo)
        have_planar = all(v is not None for v in planar)
        if have_geo == have_planar:
            raise ValueError(
                "bbox needs either min_lat/max_lat/min_lon/max_lon or min_x/max_x/min_y/max_y"
            )
        if have_geo:
            return BoundingBox(self.min_lat, self.max_lat, self.min_lon, self.max_lon, GEOGRAPHIC)
        return BoundingBox(self.min_y, self.max_y, self.min_x, self.max_x, PLANAR)


class GridRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    bbox: BBoxIn
    rows: int = Field(ge=1)
    cols: int = Field(ge=1)


def create_app(
    static_dir: Optional[str] = None,
    max_concurrent_solves: int = 4,
    cors_origins: Optional[list[str]] = None,
) -> FastAPI:
    app = FastAPI(title="waypoint-tsp planning service", docs_url=None, redoc_url=None)
    semaphore = asyncio.Semaphore(max_concurrent_solves)

    if cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=cors_origins,
            allow_methods=["GET", "POST"],
            allow_headers=["*"],
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(request: Request, exc: RequestValidationError):
        detail = [
            {"loc": [str(part) for part in err.get("loc", ())], "msg": err.get("msg", "invalid")}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"detail": detail})

    @app.get("/healthz")
    async def healthz() -> PlainTextResponse:
        return PlainTextResponse("ok")

    @app.get("/api/methods")
    async def api_methods() -> list[dict[str, Any]]:
        return methods.catalog()

    @app.post("/api/solve")
    async def api_solve(req: SolveRequest) -> JSONResponse:
        try:
            methods.parse_method(req.method)
        except methods.UnknownMethodError as exc:
            return JSONResponse(
                status_code=422,
                content={"detail": str(exc), "valid_methods": list(exc.valid_ids)},
            )

        ids = [p.id if p.id is not None else i for i, p in enumerate(req.points)]
        if len(set(ids)) != len(ids):
            raise HTTPException(status_code=400, detail="point ids must be unique")
        kind = GEOGRAPHIC if req.metric == "haversine" else PLANAR
        try:
            points = WaypointSet(
                tuple(Waypoint(i, p.lat, p.lon) for i, p in enumerate(req.points)),
                kind=kind,
            )
            matrix = build_distance_matrix(points)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None

        async with semaphore:
            try:
                result = await run_in_threadpool(
                    methods.solve,
                    matrix,
                    req.method,
                    seed=req.seed,
                    time_budget_ms=req.time_budget_ms,
                    params=req.params,
                )
            except BudgetExhaustedError as exc:
                raise HTTPException(status_code=408, detail=str(exc)) from None
            except methods.UnknownMethodError as exc:
                return JSONResponse(status_code=422, content={"detail": str(exc)})
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from None

        body: dict[str, Any] = {
            "order": [ids[i] for i in result.order],
            "length_m": result.tour_len_m,
            "elapsed_ms": result.elapsed_ms,
            "method": result.method,
            "seed": req.seed,
        }
        if req.include_trace and result.trace is not None:
            body["trace"] = [[t, c] for t, c in result.trace.samples]
        return JSONResponse(content=body)

    @app.post("/api/grid")
    async def api_grid(req: GridRequest) -> dict[str, Any]:
        if req.rows * req.cols > MAX_GRID_POINTS:
            raise HTTPException(
                status_code=400,
                detail=f"rows*cols must be <= {MAX_GRID_POINTS}, got {req.rows * req.cols}",
            )
        try:
            bbox = req.bbox.to_bbox()
            points = grid_points(bbox, req.rows, req.cols)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return {
            "kind": points.kind,
            "points": [{"id": w.id, "lat": w.lat, "lon": w.lon} for w in points],
        }

    if static_dir and os.path.isdir(static_dir):
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    else:
        @app.get("/")
        async def index() -> HTMLResponse:
            return HTMLResponse(_FALLBACK_PAGE)

    return app
