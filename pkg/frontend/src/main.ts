/**
 * DOM wiring for the planning page. All state transitions live in state.ts;
 * this module translates events into transitions, keeps the controls in sync,
 * and redraws the canvas after every change.
 */

import { fetchMethods, requestGrid, requestSolve } from "./api.js";
import type { MethodInfo } from "./api.js";
import { drawScene, screenPositions } from "./render.js";
import type { DragRect, Draw2D } from "./render.js";
import {
  addPoint,
  canSolve,
  clearPoints,
  initialState,
  removePoint,
  setCompare,
  setMethod,
  setMetric,
  setNotice,
  setSeed,
  setView,
  solveFailed,
  solveStarted,
  solveSucceeded,
} from "./state.js";
import type { MetricKind, PlanState, PointRec } from "./state.js";
import {
  fitView,
  panView,
  project,
  screenToWorld,
  unproject,
  zoomView,
} from "./transform.js";

const DRAG_MIN_PX = 5;

export interface App {
  getState(): PlanState;
  /** Resolves once every request issued so far has settled and the UI updated. */
  flush(): Promise<void>;
  redraw(): void;
}

interface Controls {
  canvas: HTMLCanvasElement;
  method: HTMLSelectElement;
  mode: HTMLSelectElement;
  metric: HTMLSelectElement;
  seed: HTMLInputElement;
  rows: HTMLInputElement;
  cols: HTMLInputElement;
  compare: HTMLInputElement;
  solve: HTMLButtonElement;
  clear: HTMLButtonElement;
  fit: HTMLButtonElement;
  params: HTMLElement;
  length: HTMLElement;
  elapsed: HTMLElement;
  notice: HTMLElement;
}

function grab(root: Document): Controls {
  const byId = <T extends Element>(id: string): T => {
    const el = root.getElementById(id);
    if (el === null) {
      throw new Error(`missing element #${id}`);
    }
    return el as unknown as T;
  };
  return {
    canvas: byId<HTMLCanvasElement>("field"),
    method: byId<HTMLSelectElement>("method"),
    mode: byId<HTMLSelectElement>("mode"),
    metric: byId<HTMLSelectElement>("metric"),
    seed: byId<HTMLInputElement>("seed"),
    rows: byId<HTMLInputElement>("rows"),
    cols: byId<HTMLInputElement>("cols"),
    compare: byId<HTMLInputElement>("compare"),
    solve: byId<HTMLButtonElement>("solve"),
    clear: byId<HTMLButtonElement>("clear"),
    fit: byId<HTMLButtonElement>("fit"),
    params: byId<HTMLElement>("params"),
    length: byId<HTMLElement>("length"),
    elapsed: byId<HTMLElement>("elapsed"),
    notice: byId<HTMLElement>("notice"),
  };
}

function renderParamInputs(root: Document, container: HTMLElement, info?: MethodInfo): void {
  container.textContent = "";
  if (!info || info.params.length === 0) {
    return;
  }
  for (const param of info.params) {
    const label = root.createElement("label");
    label.textContent = `${param.name} `;
    const input = root.createElement("input");
    input.type = "text";
    input.size = 8;
    input.dataset.param = param.name;
    input.placeholder = param.default === null ? "auto" : String(param.default);
    label.appendChild(input);
    container.appendChild(label);
  }
}

/** Non-empty inputs become params; values parse as JSON literals or strings. */
export function collectParams(container: HTMLElement): Record<string, unknown> {
  const out: Record<string, unknown> = {};
  const inputs = container.querySelectorAll<HTMLInputElement>("input[data-param]");
  inputs.forEach((input) => {
    const raw = input.value.trim();
    if (raw === "") {
      return;
    }
    const name = input.dataset.param!;
    try {
      out[name] = JSON.parse(raw);
    } catch {
      out[name] = raw;
    }
  });
  return out;
}

export function gridBBox(
  metric: MetricKind,
  a: { x: number; y: number },
  b: { x: number; y: number },
): Record<string, number> {
  if (metric === "planar") {
    return {
      min_x: Math.min(a.x, b.x),
      max_x: Math.max(a.x, b.x),
      min_y: Math.min(a.y, b.y),
      max_y: Math.max(a.y, b.y),
    };
  }
  const p = unproject("geographic", a);
  const q = unproject("geographic", b);
  return {
    min_lat: Math.min(p.lat, q.lat),
    max_lat: Math.max(p.lat, q.lat),
    min_lon: Math.min(p.lon, q.lon),
    max_lon: Math.max(p.lon, q.lon),
  };
}

export function initApp(root: Document, base = ""): App {
  const ui = grab(root);
  const ctx = ui.canvas.getContext("2d") as Draw2D | null;
  if (ctx === null) {
    throw new Error("canvas 2d context unavailable");
  }
  const width = ui.canvas.width;
  const height = ui.canvas.height;

  let state = initialState();
  let methodInfos: MethodInfo[] = [];
  let drag: (DragRect & { panning: boolean }) | null = null;
  const outstanding: Promise<unknown>[] = [];

  function redraw(): void {
    drawScene(ctx as Draw2D, width, height, state, drag ?? undefined);
  }

  function sync(): void {
    ui.solve.disabled = !canSolve(state);
    ui.length.textContent = state.route === null ? "" : String(state.route.lengthM);
    ui.elapsed.textContent =
      state.route === null ? "" : `${state.route.elapsedMs.toFixed(1)} ms`;
    ui.notice.textContent = state.notice;
    redraw();
  }

  function update(next: PlanState): void {
    state = next;
    sync();
  }

  function track<T>(work: Promise<T>): Promise<T> {
    outstanding.push(work);
    return work;
  }

  function canvasXY(ev: MouseEvent): { x: number; y: number } {
    const rect = ui.canvas.getBoundingClientRect();
    return { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
  }

  function loadMethods(): Promise<void> {
    return fetchMethods(base)
      .then((infos) => {
        methodInfos = infos;
        ui.method.textContent = "";
        for (const info of infos) {
          const opt = root.createElement("option");
          opt.value = info.id;
          opt.textContent = info.label;
          ui.method.appendChild(opt);
        }
        if (infos.length > 0) {
          ui.method.value = infos[0].id;
          renderParamInputs(root, ui.params, infos[0]);
          update(setMethod(state, infos[0].id));
        }
      })
      .catch((err: Error) => {
        update(setNotice(state, `could not load methods: ${err.message}`));
      });
  }

  function placeGrid(rect: DragRect): Promise<void> {
    const rows = parseInt(ui.rows.value, 10);
    const cols = parseInt(ui.cols.value, 10);
    if (!(rows >= 1 && cols >= 1)) {
      update(setNotice(state, "grid needs rows and cols of at least 1"));
      return Promise.resolve();
    }
    const a = screenToWorld(state.view, { x: rect.x0, y: rect.y0 }, height);
    const b = screenToWorld(state.view, { x: rect.x1, y: rect.y1 }, height);
    const bbox = gridBBox(state.metric, a, b);
    return requestGrid(bbox, rows, cols, base)
      .then((result) => {
        let next = state;
        const points: PointRec[] = result.points;
        next = { ...next, metric: result.kind };
        next = {
          ...next,
          points: [...points],
          nextId: points.reduce((m, p) => Math.max(m, p.id), -1) + 1,
          route: null,
          ghost: null,
          notice: "",
        };
        if (result.kind === "geographic") {
          const worlds = points.map((p) => project("geographic", p));
          next = setView(next, fitView(worlds, width, height));
        }
        update(next);
      })
      .catch((err: Error) => {
        update(setNotice(state, err.message));
      });
  }

  function doSolve(): Promise<void> {
    if (!canSolve(state)) {
      return Promise.resolve();
    }
    update(solveStarted(state));
    return requestSolve(
      {
        points: state.points,
        method: ui.method.value,
        seed: state.seed,
        metric: state.metric,
        params: collectParams(ui.params),
      },
      base,
    )
      .then((resp) => {
        update(
          solveSucceeded(state, {
            order: resp.order,
            lengthM: resp.length_m,
            elapsedMs: resp.elapsed_ms,
            method: resp.method,
            seed: resp.seed,
          }),
        );
      })
      .catch((err: Error) => {
        update(solveFailed(state, err.message));
      });
  }

  ui.canvas.addEventListener("mousedown", (ev) => {
    const at = canvasXY(ev as MouseEvent);
    if (at.x < 0 || at.x > width || at.y < 0 || at.y > height) {
      return;
    }
    const mode = ui.mode.value;
    if (mode === "grid" || mode === "pan") {
      drag = { x0: at.x, y0: at.y, x1: at.x, y1: at.y, panning: mode === "pan" };
    }
  });

  ui.canvas.addEventListener("mousemove", (ev) => {
    if (drag === null) {
      return;
    }
    const at = canvasXY(ev as MouseEvent);
    if (drag.panning) {
      update(setView(state, panView(state.view, at.x - drag.x1, at.y - drag.y1)));
    }
    drag.x1 = at.x;
    drag.y1 = at.y;
    redraw();
  });

  ui.canvas.addEventListener("mouseup", () => {
    if (drag === null) {
      return;
    }
    const rect: DragRect = { x0: drag.x0, y0: drag.y0, x1: drag.x1, y1: drag.y1 };
    const wasPan = drag.panning;
    drag = null;
    if (wasPan) {
      redraw();
      return;
    }
    if (Math.abs(rect.x1 - rect.x0) < DRAG_MIN_PX || Math.abs(rect.y1 - rect.y0) < DRAG_MIN_PX) {
      update(setNotice(state, "drag a larger rectangle to place a grid"));
      return;
    }
    track(placeGrid(rect));
  });

  ui.canvas.addEventListener("click", (ev) => {
    if (ui.mode.value !== "add") {
      return;
    }
    const at = canvasXY(ev as MouseEvent);
    if (at.x < 0 || at.x > width || at.y < 0 || at.y > height) {
      return;
    }
    const world = screenToWorld(state.view, at, height);
    const coords = unproject(state.metric, world);
    update(addPoint(state, coords.lat, coords.lon));
  });

  ui.canvas.addEventListener("contextmenu", (ev) => {
    ev.preventDefault();
    const at = canvasXY(ev as MouseEvent);
    const positions = screenPositions(state, height);
    for (const p of state.points) {
      const s = positions.get(p.id)!;
      const dx = s.x - at.x;
      const dy = s.y - at.y;
      if (dx * dx + dy * dy <= 8 * 8) {
        update(removePoint(state, p.id));
        return;
      }
    }
  });

  ui.canvas.addEventListener("wheel", (ev) => {
    ev.preventDefault();
    const at = canvasXY(ev as MouseEvent);
    const factor = (ev as WheelEvent).deltaY < 0 ? 1.2 : 1 / 1.2;
    update(setView(state, zoomView(state.view, factor, at, height)));
  });

  ui.method.addEventListener("change", () => {
    const info = methodInfos.find((m) => m.id === ui.method.value);
    renderParamInputs(root, ui.params, info);
    update(setMethod(state, ui.method.value));
  });

  ui.metric.addEventListener("change", () => {
    update(setMetric(state, ui.metric.value as MetricKind));
  });

  ui.seed.addEventListener("change", () => {
    const seed = parseInt(ui.seed.value, 10);
    update(setSeed(state, Number.isFinite(seed) ? seed : 0));
  });

  ui.compare.addEventListener("change", () => {
    update(setCompare(state, ui.compare.checked));
  });

  ui.solve.addEventListener("click", () => {
    track(doSolve());
  });

  ui.clear.addEventListener("click", () => {
    update(clearPoints(state));
  });

  ui.fit.addEventListener("click", () => {
    const worlds = state.points.map((p) => project(state.metric, p));
    update(setView(state, fitView(worlds, width, height)));
  });

  track(loadMethods());
  sync();

  return {
    getState: () => state,
    flush: async () => {
      while (outstanding.length > 0) {
        const batch = outstanding.splice(0, outstanding.length);
        await Promise.all(batch);
      }
    },
    redraw,
  };
}
