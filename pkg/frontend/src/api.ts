/**
 * Thin typed client for the planning service's JSON endpoints. Non-2xx
 * responses become ApiError with the server's field-level message flattened
 * into one line, so the UI can surface it verbatim.
 */

import type { MetricKind, PointRec } from "./state.js";

export interface MethodParam {
  name: string;
  default: unknown;
}

export interface MethodInfo {
  id: string;
  label: string;
  kind: string;
  stochastic: boolean;
  params: MethodParam[];
}

export interface SolveResponse {
  order: number[];
  length_m: number;
  elapsed_ms: number;
  method: string;
  seed: number;
  trace?: [number, number][];
}

export interface GridBBox {
  [key: string]: number;
}

export class ApiError extends Error {
  status: number;

  constructor(status: number, message: string) {
    super(message);
    this.status = status;
    this.name = "ApiError";
  }
}

type DetailEntry = { loc?: unknown[]; msg?: string };

/** The service sends either a plain string or a list of {loc, msg}. */
export function formatDetail(payload: unknown): string {
  if (payload === null || payload === undefined) {
    return "request failed";
  }
  const detail = (payload as { detail?: unknown }).detail ?? payload;
  if (typeof detail === "string") {
    return detail;
  }
  if (Array.isArray(detail)) {
    const parts = detail.map((entry: DetailEntry) => {
      const where = Array.isArray(entry.loc) ? entry.loc.join(".") : "";
      const what = entry.msg ?? "invalid";
      return where ? `${where}: ${what}` : what;
    });
    if (parts.length > 0) {
      return parts.join("; ");
    }
  }
  return "request failed";
}

async function readJson(resp: Response): Promise<unknown> {
  try {
    return await resp.json();
  } catch {
    return null;
  }
}

async function checked(resp: Response): Promise<unknown> {
  const body = await readJson(resp);
  if (!resp.ok) {
    throw new ApiError(resp.status, formatDetail(body));
  }
  return body;
}

export async function fetchMethods(base = ""): Promise<MethodInfo[]> {
  const resp = await fetch(`${base}/api/methods`);
  return (await checked(resp)) as MethodInfo[];
}

export interface SolveArgs {
  points: PointRec[];
  method: string;
  seed: number;
  metric: MetricKind;
  params?: Record<string, unknown>;
  timeBudgetMs?: number;
}

export async function requestSolve(args: SolveArgs, base = ""): Promise<SolveResponse> {
  const body = {
    points: args.points.map((p) => ({ id: p.id, lat: p.lat, lon: p.lon })),
    method: args.method,
    seed: args.seed,
    metric: args.metric === "planar" ? "euclidean" : "haversine",
    params: args.params ?? {},
    ...(args.timeBudgetMs !== undefined ? { time_budget_ms: args.timeBudgetMs } : {}),
  };
  const resp = await fetch(`${base}/api/solve`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
  return (await checked(resp)) as SolveResponse;
}

export async function requestGrid(
  bbox: GridBBox,
  rows: number,
  cols: number,
  base = "",
): Promise<{ kind: MetricKind; points: PointRec[] }> {
  const resp = await fetch(`${base}/api/grid`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ bbox, rows, cols }),
  });
  const body = (await checked(resp)) as {
    kind: MetricKind;
    points: { id: number; lat: number; lon: number }[];
  };
  return { kind: body.kind, points: body.points };
}
