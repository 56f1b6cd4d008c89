/**
 * Client-side planning state and its pure transitions.
 *
 * Every mutation of the point set invalidates any displayed route: a route is
 * only ever a statement about the exact points it was solved for. The solve
 * lifecycle is a three-state latch (idle -> solving -> idle) so the UI can
 * keep a single request in flight.
 */

export type MetricKind = "planar" | "geographic";

export interface PointRec {
  id: number;
  /** Latitude in degrees, or y in meters for planar sets. */
  lat: number;
  /** Longitude in degrees, or x in meters for planar sets. */
  lon: number;
}

export interface RouteRec {
  order: number[];
  lengthM: number;
  elapsedMs: number;
  method: string;
  seed: number;
}

export interface ViewTransform {
  /** Screen pixels per world unit. */
  scale: number;
  /** World coordinate of the left screen edge. */
  originX: number;
  /** World coordinate of the top screen edge (world y grows up). */
  originY: number;
}

export interface PlanState {
  points: PointRec[];
  nextId: number;
  metric: MetricKind;
  method: string;
  seed: number;
  route: RouteRec | null;
  /** Previous route kept for side-by-side comparison, drawn ghosted. */
  ghost: RouteRec | null;
  compare: boolean;
  solving: boolean;
  notice: string;
  view: ViewTransform;
}

export function initialState(): PlanState {
  return {
    points: [],
    nextId: 0,
    metric: "planar",
    method: "",
    seed: 0,
    route: null,
    ghost: null,
    compare: false,
    solving: false,
    notice: "",
    view: { scale: 1, originX: 0, originY: 0 },
  };
}

function invalidated(state: PlanState): PlanState {
  return { ...state, route: null, ghost: null };
}

export function addPoint(state: PlanState, lat: number, lon: number): PlanState {
  const point = { id: state.nextId, lat, lon };
  return {
    ...invalidated(state),
    points: [...state.points, point],
    nextId: state.nextId + 1,
    notice: "",
  };
}

export function movePoint(state: PlanState, id: number, lat: number, lon: number): PlanState {
  if (!state.points.some((p) => p.id === id)) {
    return state;
  }
  return {
    ...invalidated(state),
    points: state.points.map((p) => (p.id === id ? { ...p, lat, lon } : p)),
  };
}

export function removePoint(state: PlanState, id: number): PlanState {
  if (!state.points.some((p) => p.id === id)) {
    return state;
  }
  return {
    ...invalidated(state),
    points: state.points.filter((p) => p.id !== id),
  };
}

export function clearPoints(state: PlanState): PlanState {
  return { ...invalidated(state), points: [], nextId: 0 };
}

/** Swap in a server-generated point set (grid flow). */
export function replacePoints(state: PlanState, points: PointRec[]): PlanState {
  const ids = new Set(points.map((p) => p.id));
  if (ids.size !== points.length) {
    throw new Error("point ids must be unique");
  }
  const maxId = points.reduce((m, p) => Math.max(m, p.id), -1);
  return {
    ...invalidated(state),
    points: [...points],
    nextId: maxId + 1,
    notice: "",
  };
}

export function setMethod(state: PlanState, method: string): PlanState {
  return { ...state, method };
}

export function setSeed(state: PlanState, seed: number): PlanState {
  return { ...state, seed };
}

/** Switching coordinate semantics orphans the existing points. */
export function setMetric(state: PlanState, metric: MetricKind): PlanState {
  if (metric === state.metric) {
    return state;
  }
  return { ...clearPoints(state), metric, notice: "" };
}

export function setCompare(state: PlanState, compare: boolean): PlanState {
  return { ...state, compare, ghost: compare ? state.ghost : null };
}

export function setNotice(state: PlanState, notice: string): PlanState {
  return { ...state, notice };
}

export function canSolve(state: PlanState): boolean {
  return state.points.length >= 2 && state.method !== "" && !state.solving;
}

export function solveStarted(state: PlanState): PlanState {
  return { ...state, solving: true, notice: "" };
}

export function solveSucceeded(state: PlanState, route: RouteRec): PlanState {
  return {
    ...state,
    solving: false,
    ghost: state.compare ? state.route : null,
    route,
    notice: "",
  };
}

export function solveFailed(state: PlanState, message: string): PlanState {
  return { ...state, solving: false, notice: message };
}

export function setView(state: PlanState, view: ViewTransform): PlanState {
  return { ...state, view };
}

/** True when the route (if any) visits each current point exactly once. */
export function routeMatchesPoints(state: PlanState): boolean {
  if (state.route === null) {
    return true;
  }
  const ids = state.points.map((p) => p.id).sort((a, b) => a - b);
  const visited = [...state.route.order].sort((a, b) => a - b);
  return ids.length === visited.length && ids.every((v, i) => v === visited[i]);
}
