/**
 * World/screen mapping for the field view.
 *
 * World space is meters: planar points are already meters, geographic points
 * go through a plain equirectangular projection (standard parallel at the
 * equator). The projection is a display aid only; all lengths shown to the
 * user come from the server.
 */

import type { MetricKind, PointRec, ViewTransform } from "./state.js";

export const EARTH_RADIUS_M = 6371000;

export interface WorldXY {
  x: number;
  y: number;
}

export function project(metric: MetricKind, point: PointRec): WorldXY {
  if (metric === "planar") {
    return { x: point.lon, y: point.lat };
  }
  const rad = Math.PI / 180;
  return { x: EARTH_RADIUS_M * point.lon * rad, y: EARTH_RADIUS_M * point.lat * rad };
}

/** Inverse of project, for turning canvas clicks into point coordinates. */
export function unproject(metric: MetricKind, world: WorldXY): { lat: number; lon: number } {
  if (metric === "planar") {
    return { lat: world.y, lon: world.x };
  }
  const deg = 180 / Math.PI;
  return { lat: (world.y / EARTH_RADIUS_M) * deg, lon: (world.x / EARTH_RADIUS_M) * deg };
}

/** Canvas y grows downward, world y grows upward. */
export function worldToScreen(view: ViewTransform, world: WorldXY, height: number): WorldXY {
  return {
    x: (world.x - view.originX) * view.scale,
    y: height - (world.y - view.originY) * view.scale,
  };
}

export function screenToWorld(view: ViewTransform, screen: WorldXY, height: number): WorldXY {
  return {
    x: view.originX + screen.x / view.scale,
    y: view.originY + (height - screen.y) / view.scale,
  };
}

export function panView(view: ViewTransform, dxPixels: number, dyPixels: number): ViewTransform {
  return {
    scale: view.scale,
    originX: view.originX - dxPixels / view.scale,
    originY: view.originY + dyPixels / view.scale,
  };
}

function clampScale(scale: number): number {
  return Math.min(1e6, Math.max(1e-6, scale));
}

/** Zoom by `factor` keeping the world point under the cursor fixed. */
export function zoomView(
  view: ViewTransform,
  factor: number,
  cursor: WorldXY,
  height: number,
): ViewTransform {
  const anchor = screenToWorld(view, cursor, height);
  const scale = clampScale(view.scale * factor);
  return {
    scale,
    originX: anchor.x - cursor.x / scale,
    originY: anchor.y - (height - cursor.y) / scale,
  };
}

/** A view that shows every point with some margin. */
export function fitView(
  worlds: WorldXY[],
  width: number,
  height: number,
  marginPx = 40,
): ViewTransform {
  if (worlds.length === 0) {
    return { scale: 1, originX: 0, originY: 0 };
  }
  let minX = Infinity;
  let maxX = -Infinity;
  let minY = Infinity;
  let maxY = -Infinity;
  for (const w of worlds) {
    minX = Math.min(minX, w.x);
    maxX = Math.max(maxX, w.x);
    minY = Math.min(minY, w.y);
    maxY = Math.max(maxY, w.y);
  }
  const spanX = Math.max(maxX - minX, 1e-9);
  const spanY = Math.max(maxY - minY, 1e-9);
  const usableW = Math.max(width - 2 * marginPx, 1);
  const usableH = Math.max(height - 2 * marginPx, 1);
  const scale = clampScale(Math.min(usableW / spanX, usableH / spanY));
  const centerX = (minX + maxX) / 2;
  const centerY = (minY + maxY) / 2;
  return {
    scale,
    originX: centerX - width / (2 * scale),
    originY: centerY - height / (2 * scale),
  };
}
