/** View state, serialized into the URL hash so every view is shareable.
 *
 * Every query parameter held here maps one to one onto a server query
 * string (see api.ts), and encode/decode round-trip exactly.
 */

export type ViewName =
  | "od"
  | "forecast"
  | "accessibility"
  | "reliability"
  | "congestion"
  | "transfer";

export type Direction = "inbound" | "outbound";
export type ChartMode = "bar" | "curve";

export interface ViewState {
  view: ViewName;
  center: [number, number];
  zoom: number;
  od: { window: string | null };
  forecast: { direction: Direction; date: string | null; mode: ChartMode };
  accessibility: { budgetMin: number; minSamples: number | null };
  congestion: { date: string | null; period: number };
  transfer: { from: string; to: string; maxTransfers: number };
}

const VIEW_NAMES: readonly ViewName[] = [
  "od",
  "forecast",
  "accessibility",
  "reliability",
  "congestion",
  "transfer",
];

export function defaultState(): ViewState {
  return {
    view: "od",
    center: [114.2, 22.65],
    zoom: 6,
    od: { window: null },
    forecast: { direction: "outbound", date: null, mode: "bar" },
    accessibility: { budgetMin: 45, minSamples: null },
    congestion: { date: null, period: 1 },
    transfer: { from: "", to: "", maxTransfers: 2 },
  };
}

export function encodeState(state: ViewState): string {
  const q = new URLSearchParams();
  q.set("view", state.view);
  q.set("center", `${state.center[0]},${state.center[1]}`);
  q.set("zoom", String(state.zoom));
  if (state.od.window !== null) q.set("od.window", state.od.window);
  q.set("fc.direction", state.forecast.direction);
  if (state.forecast.date !== null) q.set("fc.date", state.forecast.date);
  q.set("fc.mode", state.forecast.mode);
  q.set("acc.budget", String(state.accessibility.budgetMin));
  if (state.accessibility.minSamples !== null) {
    q.set("acc.min_samples", String(state.accessibility.minSamples));
  }
  if (state.congestion.date !== null) q.set("cg.date", state.congestion.date);
  q.set("cg.period", String(state.congestion.period));
  if (state.transfer.from !== "") q.set("tr.from", state.transfer.from);
  if (state.transfer.to !== "") q.set("tr.to", state.transfer.to);
  q.set("tr.max", String(state.transfer.maxTransfers));
  return "#" + q.toString();
}

function num(raw: string | null, fallback: number): number {
  if (raw === null) return fallback;
  const v = Number(raw);
  return Number.isFinite(v) ? v : fallback;
}

function intIn(raw: string | null, fallback: number, lo: number, hi: number): number {
  const v = num(raw, fallback);
  return Number.isInteger(v) && v >= lo && v <= hi ? v : fallback;
}

export function decodeState(hash: string): ViewState {
  const state = defaultState();
  const raw = hash.startsWith("#") ? hash.slice(1) : hash;
  if (raw === "") return state;
  const q = new URLSearchParams(raw);

  const view = q.get("view");
  if (view !== null && (VIEW_NAMES as readonly string[]).includes(view)) {
    state.view = view as ViewName;
  }
  const center = q.get("center");
  if (center !== null) {
    const parts = center.split(",").map(Number);
    if (parts.length === 2 && parts.every(Number.isFinite)) {
      state.center = [parts[0]!, parts[1]!];
    }
  }
  state.zoom = num(q.get("zoom"), state.zoom);

  state.od.window = q.get("od.window");

  const dir = q.get("fc.direction");
  if (dir === "inbound" || dir === "outbound") state.forecast.direction = dir;
  state.forecast.date = q.get("fc.date");
  const mode = q.get("fc.mode");
  if (mode === "bar" || mode === "curve") state.forecast.mode = mode;

  state.accessibility.budgetMin = num(q.get("acc.budget"), state.accessibility.budgetMin);
  const minSamples = q.get("acc.min_samples");
  state.accessibility.minSamples =
    minSamples === null ? null : intIn(minSamples, 1, 1, Number.MAX_SAFE_INTEGER);

  state.congestion.date = q.get("cg.date");
  state.congestion.period = intIn(q.get("cg.period"), state.congestion.period, 1, 96);

  state.transfer.from = q.get("tr.from") ?? "";
  state.transfer.to = q.get("tr.to") ?? "";
  state.transfer.maxTransfers = intIn(q.get("tr.max"), state.transfer.maxTransfers, 0, 10);

  return state;
}
