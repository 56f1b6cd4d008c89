/**
 * Canvas drawing for the field view. Everything here takes a structural
 * subset of CanvasRenderingContext2D so tests can pass a recording stub.
 */

import type { PlanState, PointRec, RouteRec } from "./state.js";
import { project, worldToScreen } from "./transform.js";
import type { WorldXY } from "./transform.js";

export interface Draw2D {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  closePath(): void;
  stroke(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
  setLineDash(segments: number[]): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  strokeStyle: string;
  fillStyle: string;
  lineWidth: number;
  font: string;
  globalAlpha: number;
}

export const POINT_RADIUS = 5;

export function screenPositions(state: PlanState, height: number): Map<number, WorldXY> {
  const out = new Map<number, WorldXY>();
  for (const p of state.points) {
    out.set(p.id, worldToScreen(state.view, project(state.metric, p), height));
  }
  return out;
}

function drawRoute(
  ctx: Draw2D,
  route: RouteRec,
  positions: Map<number, WorldXY>,
  style: { color: string; alpha: number; dash: number[] },
): void {
  if (route.order.length < 2) {
    return;
  }
  if (!route.order.every((id) => positions.has(id))) {
    return;
  }
  ctx.globalAlpha = style.alpha;
  ctx.strokeStyle = style.color;
  ctx.lineWidth = 2;
  ctx.setLineDash(style.dash);
  ctx.beginPath();
  const first = positions.get(route.order[0])!;
  ctx.moveTo(first.x, first.y);
  for (const id of route.order.slice(1)) {
    const at = positions.get(id)!;
    ctx.lineTo(at.x, at.y);
  }
  ctx.closePath();
  ctx.stroke();
  ctx.setLineDash([]);
  ctx.globalAlpha = 1;
}

function drawPoint(ctx: Draw2D, point: PointRec, at: WorldXY): void {
  ctx.fillStyle = "#1c6dd0";
  ctx.beginPath();
  ctx.arc(at.x, at.y, POINT_RADIUS, 0, 2 * Math.PI);
  ctx.fill();
  ctx.fillStyle = "#222";
  ctx.font = "11px sans-serif";
  ctx.fillText(String(point.id), at.x + POINT_RADIUS + 2, at.y - 2);
}

export interface DragRect {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export function drawScene(
  ctx: Draw2D,
  width: number,
  height: number,
  state: PlanState,
  drag?: DragRect,
): void {
  ctx.clearRect(0, 0, width, height);
  const positions = screenPositions(state, height);
  if (state.ghost !== null) {
    drawRoute(ctx, state.ghost, positions, { color: "#999", alpha: 0.5, dash: [6, 4] });
  }
  if (state.route !== null) {
    drawRoute(ctx, state.route, positions, { color: "#d03a2b", alpha: 1, dash: [] });
  }
  for (const p of state.points) {
    drawPoint(ctx, p, positions.get(p.id)!);
  }
  if (drag) {
    ctx.strokeStyle = "#1c6dd0";
    ctx.lineWidth = 1;
    ctx.setLineDash([4, 3]);
    ctx.strokeRect(
      Math.min(drag.x0, drag.x1),
      Math.min(drag.y0, drag.y1),
      Math.abs(drag.x1 - drag.x0),
      Math.abs(drag.y1 - drag.y0),
    );
    ctx.setLineDash([]);
  }
}
