"""Dataset I/O: CSV/GeoJSON loading, seeded synthetic generation, grid point
layout, and ordered-route export.

Coordinates are serialized with 9 fractional digits (about 0.1 mm on Earth),
and generated coordinates are quantized to that precision up front, so
save/load round-trips are bit-exact.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass

from .core import (
    EARTH_RADIUS_M,
    GEOGRAPHIC,
    PLANAR,
    Tour,
    Waypoint,
    WaypointSet,
    validate_permutation,
)
from .ioutil import atomic_write_text

CSV_HEADER = "id,lat,lon"


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box. Geographic boxes hold degrees; planar boxes hold
    meters, with y in the lat slots and x in the lon slots (same convention
    as Waypoint)."""

    min_lat: float
    max_lat: float
    min_lon: float
    max_lon: float
    kind: str = GEOGRAPHIC

    def __post_init__(self):
        if self.kind not in (GEOGRAPHIC, PLANAR):
            raise ValueError(f"kind must be {GEOGRAPHIC!r} or {PLANAR!r}, got {self.kind!r}")
        if not (self.min_lat < self.max_lat and self.min_lon < self.max_lon):
            raise ValueError("bounding box must satisfy min < max on both axes")
        if self.kind == GEOGRAPHIC:
            if not (-90.0 <= self.min_lat and self.max_lat <= 90.0):
                raise ValueError("latitude bounds outside [-90, 90]")
            if not (-180.0 <= self.min_lon and self.max_lon <= 180.0):
                raise ValueError("longitude bounds outside [-180, 180]")
        for v in (self.min_lat, self.max_lat, self.min_lon, self.max_lon):
            if not math.isfinite(v):
                raise ValueError("bounding box coordinates must be finite")

    def clamp(self, lat: float, lon: float) -> tuple[float, float]:
        return (
            min(max(lat, self.min_lat), self.max_lat),
            min(max(lon, self.min_lon), self.max_lon),
        )


def _default_bbox() -> BoundingBox:
    """A square of 11 km^2 centered on (6.88, -8.09), the working area used
    throughout the examples: side = sqrt(11e6) m converted to degrees at the
    center latitude."""
    center_lat, center_lon = 6.88, -8.09
    half_m = math.sqrt(11.0e6) / 2.0
    dlat = half_m / (EARTH_RADIUS_M * math.pi / 180.0)
    dlon = dlat / math.cos(math.radians(center_lat))
    return BoundingBox(center_lat - dlat, center_lat + dlat,
                       center_lon - dlon, center_lon + dlon)


DEFAULT_BBOX = _default_bbox()


def quantize9(value: float) -> float:
    """Round to 9 fractional decimal digits, the serialization precision."""
    return float(f"{value:.9f}")


def generate_dataset(n: int, bbox: BoundingBox | None = None, rng_seed: int = 0) -> WaypointSet:
    """n points uniform over bbox, quantized to serialization precision and
    clamped back inside; a pure function of (n, bbox, rng_seed)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if bbox is None:
        bbox = DEFAULT_BBOX
    rng = random.Random(rng_seed)
    points = []
    for i in range(n):
        lat = bbox.min_lat + (bbox.max_lat - bbox.min_lat) * rng.random()
        lon = bbox.min_lon + (bbox.max_lon - bbox.min_lon) * rng.random()
        lat, lon = bbox.clamp(quantize9(lat), quantize9(lon))
        points.append(Waypoint(i, lat, lon))
    return WaypointSet(tuple(points), kind=bbox.kind)


def grid_points(bbox: BoundingBox, rows: int, cols: int) -> WaypointSet:
    """rows x cols points at the cell centers of a uniform subdivision of
    bbox, ids in row-major order (within a row, the lon/x axis varies)."""
    if rows < 1 or cols < 1:
        raise ValueError(f"rows and cols must be >= 1, got {rows}x{cols}")
    dlat = (bbox.max_lat - bbox.min_lat) / rows
    dlon = (bbox.max_lon - bbox.min_lon) / cols
    points = []
    for r in range(rows):
        lat = quantize9(bbox.min_lat + (r + 0.5) * dlat)
        for c in range(cols):
            lon = quantize9(bbox.min_lon + (c + 0.5) * dlon)
            points.append(Waypoint(len(points), lat, lon))
    return WaypointSet(tuple(points), kind=bbox.kind)


def _parse_csv(text: str, path: str, kind: str) -> WaypointSet:
    lines = [ln.rstrip("\r") for ln in text.split("\n")]
    while lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ValueError(f"{path}: empty file")
    if lines[0] != CSV_HEADER:
        raise ValueError(f"{path}: line 1: header must be exactly {CSV_HEADER!r}, got {lines[0]!r}")
    points = []
    for row, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 3:
            raise ValueError(f"{path}: line {row}: expected 3 fields, got {len(parts)}")
        try:
            pid = int(parts[0])
            lat = float(parts[1])
            lon = float(parts[2])
        except ValueError:
            raise ValueError(f"{path}: line {row}: could not parse {line!r}") from None
        if pid != row - 2:
            raise ValueError(f"{path}: line {row}: id must be {row - 2} (dense, in file order), got {pid}")
        if not (math.isfinite(lat) and math.isfinite(lon)):
            raise ValueError(f"{path}: line {row}: coordinates must be finite")
        if kind == GEOGRAPHIC:
            if not -90.0 <= lat <= 90.0:
                raise ValueError(f"{path}: line {row}: latitude {lat} outside [-90, 90]")
            if not -180.0 <= lon <= 180.0:
                raise ValueError(f"{path}: line {row}: longitude {lon} outside [-180, 180]")
        points.append(Waypoint(pid, lat, lon))
    if not points:
        raise ValueError(f"{path}: no data rows")
    return WaypointSet(tuple(points), kind=kind)


def _parse_geojson(text: str, path: str, kind: str) -> WaypointSet:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: line {exc.lineno}: invalid JSON: {exc.msg}") from None
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise ValueError(f"{path}: expected a GeoJSON FeatureCollection")
    features = doc.get("features")
    if not isinstance(features, list) or not features:
        raise ValueError(f"{path}: FeatureCollection has no features")
    raw = []
    for idx, feature in enumerate(features):
        geom = feature.get("geometry") or {}
        if geom.get("type") != "Point":
            raise ValueError(f"{path}: feature {idx}: geometry must be a Point")
        coords = geom.get("coordinates")
        if not isinstance(coords, list) or len(coords) < 2:
            raise ValueError(f"{path}: feature {idx}: coordinates must be [lon, lat]")
        lon, lat = float(coords[0]), float(coords[1])
        props = feature.get("properties") or {}
        pid = props.get("id", idx)
        raw.append((int(pid), lat, lon, idx))
    ids = [pid for pid, _, _, _ in raw]
    if len(set(ids)) != len(ids):
        dup = next(i for i in ids if ids.count(i) > 1)
        raise ValueError(f"{path}: duplicate id {dup}")
    if sorted(ids) != list(range(len(ids))):
        raise ValueError(f"{path}: ids must be dense 0..{len(ids) - 1}")
    raw.sort(key=lambda item: item[0])
    points = tuple(Waypoint(pid, lat, lon) for pid, lat, lon, _ in raw)
    return WaypointSet(points, kind=kind)


def load_waypoints(path: str, format: str | None = None, kind: str = GEOGRAPHIC) -> WaypointSet:
    """Read waypoints from CSV (header id,lat,lon) or GeoJSON. format is
    inferred from the extension when not given. kind selects coordinate
    validation; planar files reuse the same columns for y/x meters."""
    if format is None:
        lower = path.lower()
        if lower.endswith(".csv"):
            format = "csv"
        elif lower.endswith(".json") or lower.endswith(".geojson"):
            format = "geojson"
        else:
            raise ValueError(f"{path}: cannot infer format from extension; pass format=")
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if format == "csv":
        return _parse_csv(text, path, kind)
    if format == "geojson":
        return _parse_geojson(text, path, kind)
    raise ValueError(f"unknown format {format!r}, expected 'csv' or 'geojson'")


def save_waypoints(points: WaypointSet, path: str) -> None:
    """Write the canonical CSV form: header, one row per point, 9 fractional
    digits, LF endings. Atomic."""
    lines = [CSV_HEADER]
    for w in points:
        lines.append(f"{w.id},{w.lat:.9f},{w.lon:.9f}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def export_route(tour: Tour, points: WaypointSet, path: str) -> None:
    """Write the visit order as JSON: {"length_m": ..., "route": [{id, lat,
    lon}, ...]}. The closing leg back to route[0] is implied, not repeated."""
    validate_permutation(tour.order, len(points))
    by_id = {w.id: w for w in points}
    doc = {
        "length_m": tour.length_m,
        "route": [
            {"id": i, "lat": by_id[i].lat, "lon": by_id[i].lon}
            for i in tour.order
        ],
    }
    atomic_write_text(path, json.dumps(doc, indent=2) + "\n")
