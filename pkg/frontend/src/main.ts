/** Browser entry point: URL-driven view state, fetch, render.
 *
 * All analysis numbers on screen are fields of API responses; this file
 * only routes, fetches, and mounts the scene builders' output.
 */

import { ApiClient, ApiRequestError } from "./api.js";
import {
  decodeState,
  defaultState,
  encodeState,
  type Direction,
  type ViewName,
  type ViewState,
} from "./state.js";
import { ViewSequencer } from "./sequence.js";
import { pan, zoomBy, type Size, type Viewport } from "./map.js";
import { buildOdScene } from "./scenes/od.js";
import {
  buildForecastScene,
  buildReportTables,
  missingReportScene,
  type TableRow,
} from "./scenes/forecast.js";
import {
  buildTransferList,
  validateTransferForm,
  type PlanView,
} from "./scenes/transfer.js";
import {
  buildAccessibilityScene,
  markStale,
  planAccessibilityRequest,
  type AccessibilityScene,
} from "./scenes/accessibility.js";
import { buildCongestionScene, CONGESTION_COLORS } from "./scenes/congestion.js";
import { buildReliabilityScene, RELIABILITY_COLORS } from "./scenes/reliability.js";
import { esc, forecastChartSvg, mapSvg, odLines } from "./svg.js";
import type { ZonesPayload } from "./types.js";

const MAP_SIZE: Size = { width: 760, height: 520 };
const CHART_SIZE: Size = { width: 720, height: 300 };
const VIEWS: { name: ViewName; label: string }[] = [
  { name: "od", label: "OD flows" },
  { name: "forecast", label: "Forecast" },
  { name: "accessibility", label: "Accessibility" },
  { name: "reliability", label: "Reliability" },
  { name: "congestion", label: "Congestion" },
  { name: "transfer", label: "Transfers" },
];

const apiBase = new URLSearchParams(window.location.search).get("api") ?? "";
const api = new ApiClient(apiBase, (url) => window.fetch(url));
const sequencer = new ViewSequencer();

let state: ViewState = decodeState(window.location.hash);
let zonesCache: ZonesPayload | null = null;
let lastAccessibility: AccessibilityScene | null = null;
let selectedPlan = 0;

function syncUrl(): void {
  window.history.replaceState(null, "", encodeState(state));
}

function setState(mutate: (s: ViewState) => void): void {
  mutate(state);
  syncUrl();
  void render();
}

function viewport(): Viewport {
  return { center: state.center, zoom: state.zoom };
}

async function zones(): Promise<ZonesPayload> {
  if (zonesCache === null) zonesCache = await api.zones();
  return zonesCache;
}

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node;
}

function tableHtml(title: string, header: string[], rows: TableRow[]): string {
  const head =
    header.length > 0
      ? `<tr><th></th>${header.map((h) => `<th>${esc(h)}</th>`).join("")}</tr>`
      : "";
  const body = rows
    .map(
      (r) =>
        `<tr><th>${esc(r.label)}</th>${r.values
          .map((v) => `<td>${esc(v)}</td>`)
          .join("")}</tr>`,
    )
    .join("");
  return `<h3>${esc(title)}</h3><table>${head}${body}</table>`;
}

function errorHtml(err: unknown): string {
  if (err instanceof ApiRequestError) {
    return `<p class="error">${esc(err.code)}: ${esc(err.message)}</p>`;
  }
  return `<p class="error">request failed: ${esc(String(err))}</p>`;
}

function navHtml(): string {
  return VIEWS.map(
    (v) =>
      `<button data-view="${v.name}" class="${v.name === state.view ? "active" : ""}">` +
      `${esc(v.label)}</button>`,
  ).join("");
}

function mapControlsHtml(): string {
  return (
    `<span class="map-controls">` +
    `<button data-map="zoom-in">+</button><button data-map="zoom-out">-</button>` +
    `<button data-map="left">&#8592;</button><button data-map="right">&#8594;</button>` +
    `<button data-map="up">&#8593;</button><button data-map="down">&#8595;</button>` +
    `</span>`
  );
}

async function renderOd(): Promise<void> {
  const token = sequencer.begin("od");
  el("controls").innerHTML =
    `<label>window <input id="od-window" placeholder="YYYY-MM-DD or a..b" ` +
    `value="${esc(state.od.window ?? "")}"></label>` +
    `<button id="od-apply">apply</button> ${mapControlsHtml()}`;
  try {
    const [z, od] = await Promise.all([zones(), api.od(state.od)]);
    if (!sequencer.shouldApply("od", token)) return;
    const scene = buildOdScene(od, z, viewport(), MAP_SIZE);
    el("map").innerHTML = mapSvg(z, viewport(), MAP_SIZE, () => "#e8e4da", odLines(scene));
    const legend = scene.legend
      .map((s) => `<span>count ${s.count}: ${s.width.toFixed(1)}px</span>`)
      .join(" ");
    el("panel").innerHTML =
      (scene.placeholder !== null ? `<p>${esc(scene.placeholder)}</p>` : "") +
      `<p>trips ${od.total_trips}, unassigned ${od.unassigned}, ` +
      `conserved ${od.conserved}</p><p class="legend">${legend}</p>` +
      `<p class="hash">config ${esc(od.config_hash.slice(0, 12))}</p>`;
  } catch (err) {
    if (!sequencer.shouldApply("od", token)) return;
    el("panel").innerHTML = errorHtml(err);
  }
}

async function renderForecast(): Promise<void> {
  const token = sequencer.begin("forecast");
  const dir = state.forecast.direction;
  el("controls").innerHTML =
    `<label>direction <select id="fc-direction">` +
    `<option${dir === "outbound" ? " selected" : ""}>outbound</option>` +
    `<option${dir === "inbound" ? " selected" : ""}>inbound</option>` +
    `</select></label>` +
    `<label>date <input id="fc-date" value="${esc(state.forecast.date ?? "")}" ` +
    `placeholder="first date"></label>` +
    `<button id="fc-mode">${state.forecast.mode === "bar" ? "curve" : "bar"} view</button>`;
  try {
    const flows = await api.flows(dir);
    const report = await api.forecastReport(dir);
    const predictions = await api.forecastAllPeriods(dir, report.report.model.periods);
    if (!sequencer.shouldApply("forecast", token)) return;
    const scene = buildForecastScene(flows, predictions, state.forecast.date, state.forecast.mode);
    const tables = buildReportTables(report);
    el("map").innerHTML = forecastChartSvg(scene, CHART_SIZE);
    el("panel").innerHTML =
      (scene.banner !== null ? `<p class="error">${esc(scene.banner)}</p>` : "") +
      tableHtml("Regression statistics", [], tables.statistics) +
      tableHtml("ANOVA", tables.anova.header, tables.anova.rows) +
      tableHtml("Coefficients", tables.coefficients.header, tables.coefficients.rows) +
      (tables.validation !== null ? tableHtml("Holdout validation", [], tables.validation) : "");
  } catch (err) {
    if (!sequencer.shouldApply("forecast", token)) return;
    const scene = missingReportScene(
      err instanceof ApiRequestError ? err.message : String(err),
      state.forecast.mode,
    );
    el("map").innerHTML = forecastChartSvg(scene, CHART_SIZE);
    el("panel").innerHTML = errorHtml(err);
  }
}

async function renderAccessibility(): Promise<void> {
  const token = sequencer.begin("accessibility");
  el("controls").innerHTML =
    `<label>budget (min) <input id="acc-budget" type="number" min="0" step="5" ` +
    `value="${state.accessibility.budgetMin}"></label>` +
    `<label>min samples <input id="acc-min" type="number" min="1" ` +
    `value="${state.accessibility.minSamples ?? ""}" placeholder="server default"></label> ` +
    mapControlsHtml();
  const plan = planAccessibilityRequest(
    state.accessibility.budgetMin,
    state.accessibility.minSamples,
  );
  let scene: AccessibilityScene;
  let note = "";
  if (!plan.send) {
    scene = plan.scene;
  } else {
    try {
      const payload = await api.accessibility(
        state.accessibility.budgetMin,
        state.accessibility.minSamples,
      );
      if (!sequencer.shouldApply("accessibility", token)) return;
      scene = buildAccessibilityScene(payload);
    } catch (err) {
      if (!sequencer.shouldApply("accessibility", token)) return;
      scene =
        lastAccessibility !== null
          ? markStale(lastAccessibility)
          : {
              kind: "accessibility",
              shadedZoneIds: [],
              budget: state.accessibility.budgetMin,
              minSamples: state.accessibility.minSamples,
              staleData: true,
            };
      note = errorHtml(err);
    }
  }
  lastAccessibility = scene;
  const shaded = new Set(scene.shadedZoneIds);
  const z = await zones();
  el("map").innerHTML = mapSvg(z, viewport(), MAP_SIZE, (id) =>
    shaded.has(id) ? "#79b8f0" : "#e8e4da",
  );
  el("panel").innerHTML =
    (scene.staleData ? `<p class="badge">stale data</p>` : "") +
    note +
    `<p>${scene.shadedZoneIds.length} zones reachable within ${scene.budget} minutes</p>`;
}

async function renderReliability(): Promise<void> {
  const token = sequencer.begin("reliability");
  el("controls").innerHTML = mapControlsHtml();
  try {
    const [z, payload] = await Promise.all([zones(), api.reliability()]);
    if (!sequencer.shouldApply("reliability", token)) return;
    const scene = buildReliabilityScene(payload);
    const fill = new Map(scene.cells.map((c) => [c.zoneId, c.fill]));
    el("map").innerHTML = mapSvg(z, viewport(), MAP_SIZE, (id) => fill.get(id) ?? "#e8e4da");
    const legend = Object.entries(RELIABILITY_COLORS)
      .map(([k, v]) => `<span style="color:${v}">&#9632; ${esc(k)}</span>`)
      .join(" ");
    el("panel").innerHTML =
      `<p class="legend">${legend}</p>` +
      `<p>spread threshold ${payload.threshold}, min samples ${payload.min_samples}</p>`;
  } catch (err) {
    if (!sequencer.shouldApply("reliability", token)) return;
    el("panel").innerHTML = errorHtml(err);
  }
}

async function renderCongestion(): Promise<void> {
  const token = sequencer.begin("congestion");
  el("controls").innerHTML =
    `<label>date <input id="cg-date" value="${esc(state.congestion.date ?? "")}" ` +
    `placeholder="YYYY-MM-DD"></label>` +
    `<label>period <input id="cg-period" type="number" min="1" max="12" ` +
    `value="${state.congestion.period}"></label>` +
    `<button id="cg-apply">apply</button> ${mapControlsHtml()}`;
  if (state.congestion.date === null) {
    el("panel").innerHTML = `<p>pick a date to load congestion</p>`;
    const z = await zones();
    el("map").innerHTML = mapSvg(z, viewport(), MAP_SIZE, () => "#e8e4da");
    return;
  }
  try {
    const [z, payload] = await Promise.all([
      zones(),
      api.congestion(state.congestion.date, state.congestion.period),
    ]);
    if (!sequencer.shouldApply("congestion", token)) return;
    const scene = buildCongestionScene(payload);
    const fill = new Map(scene.cells.map((c) => [c.zoneId, c.fill]));
    el("map").innerHTML = mapSvg(z, viewport(), MAP_SIZE, (id) => fill.get(id) ?? "#e8e4da");
    const legend = Object.entries(CONGESTION_COLORS)
      .map(([k, v]) => `<span style="color:${v}">&#9632; ${esc(k)}</span>`)
      .join(" ");
    el("panel").innerHTML =
      `<p class="legend">${legend}</p>` +
      `<p>free &#8805; ${payload.thresholds.free_min_kmh} km/h, ` +
      `slow &#8805; ${payload.thresholds.slow_min_kmh} km/h</p>`;
  } catch (err) {
    if (!sequencer.shouldApply("congestion", token)) return;
    el("panel").innerHTML = errorHtml(err);
  }
}

function planDetailHtml(p: PlanView, expanded: boolean): string {
  const transfers = new Set(p.transferStations);
  const schematic = p.stations
    .map((s) =>
      transfers.has(s)
        ? `<strong class="transfer-station">${esc(s)}</strong>`
        : esc(s),
    )
    .join(" &#8594; ");
  const legs = p.legs
    .map(
      (l) =>
        `<li>ride ${esc(l.route)} from ${esc(l.board)} to ${esc(l.alight)} ` +
        `(${l.hops} stop${l.hops === 1 ? "" : "s"})</li>`,
    )
    .join("");
  return (
    `<div class="plan${expanded ? " expanded" : ""}" data-plan="${p.index}">` +
    `<button data-plan-toggle="${p.index}">` +
    `<span class="badge">${esc(p.badge)}</span> ${schematic} ` +
    `<span class="stops">${p.totalStops} stops</span></button>` +
    (expanded ? `<ul>${legs}</ul>` : "") +
    `</div>`
  );
}

async function renderTransfer(): Promise<void> {
  const token = sequencer.begin("transfer");
  el("controls").innerHTML =
    `<label>from <input id="tr-from" value="${esc(state.transfer.from)}"></label>` +
    `<label>to <input id="tr-to" value="${esc(state.transfer.to)}"></label>` +
    `<label>max transfers <input id="tr-max" type="number" min="0" max="10" ` +
    `value="${state.transfer.maxTransfers}"></label>` +
    `<button id="tr-apply">search</button>`;
  const z = await zones();
  el("map").innerHTML = mapSvg(z, viewport(), MAP_SIZE, () => "#e8e4da");
  const formError = validateTransferForm(state.transfer.from, state.transfer.to);
  if (formError !== null) {
    el("panel").innerHTML =
      state.transfer.from === "" && state.transfer.to === ""
        ? `<p>enter stations to search transfer plans</p>`
        : `<p class="error">${esc(formError)}</p>`;
    return;
  }
  try {
    const payload = await api.transfer(
      state.transfer.from,
      state.transfer.to,
      state.transfer.maxTransfers,
    );
    if (!sequencer.shouldApply("transfer", token)) return;
    const plans = buildTransferList(payload);
    if (plans.length === 0) {
      el("panel").innerHTML = `<p>no plans within ${payload.max_transfers} transfers</p>`;
      return;
    }
    if (selectedPlan >= plans.length) selectedPlan = 0;
    el("panel").innerHTML = plans
      .map((p) => planDetailHtml(p, p.index === selectedPlan))
      .join("");
  } catch (err) {
    if (!sequencer.shouldApply("transfer", token)) return;
    el("panel").innerHTML = errorHtml(err);
  }
}

async function render(): Promise<void> {
  el("nav").innerHTML = navHtml();
  switch (state.view) {
    case "od":
      return renderOd();
    case "forecast":
      return renderForecast();
    case "accessibility":
      return renderAccessibility();
    case "reliability":
      return renderReliability();
    case "congestion":
      return renderCongestion();
    case "transfer":
      return renderTransfer();
  }
}

function readInput(id: string): string {
  return (document.getElementById(id) as HTMLInputElement | null)?.value ?? "";
}

function wireEvents(): void {
  document.body.addEventListener("click", (ev) => {
    const target = ev.target instanceof Element ? ev.target.closest("[data-view],[data-map],[data-plan-toggle],#od-apply,#fc-mode,#cg-apply,#tr-apply") : null;
    if (target === null) return;
    const view = target.getAttribute("data-view");
    if (view !== null) {
      setState((s) => {
        s.view = view as ViewName;
      });
      return;
    }
    const move = target.getAttribute("data-map");
    if (move !== null) {
      setState((s) => {
        const vp = { center: s.center, zoom: s.zoom };
        const step = 80;
        const next =
          move === "zoom-in"
            ? zoomBy(vp, 1)
            : move === "zoom-out"
              ? zoomBy(vp, -1)
              : pan(
                  vp,
                  move === "left" ? step : move === "right" ? -step : 0,
                  move === "up" ? step : move === "down" ? -step : 0,
                  MAP_SIZE,
                );
        s.center = next.center;
        s.zoom = next.zoom;
      });
      return;
    }
    const planToggle = target.getAttribute("data-plan-toggle");
    if (planToggle !== null) {
      selectedPlan = Number(planToggle);
      void render();
      return;
    }
    switch (target.id) {
      case "od-apply":
        setState((s) => {
          const w = readInput("od-window").trim();
          s.od.window = w === "" ? null : w;
        });
        break;
      case "fc-mode":
        setState((s) => {
          s.forecast.mode = s.forecast.mode === "bar" ? "curve" : "bar";
        });
        break;
      case "cg-apply":
        setState((s) => {
          const d = readInput("cg-date").trim();
          s.congestion.date = d === "" ? null : d;
          s.congestion.period = Number(readInput("cg-period")) || 1;
        });
        break;
      case "tr-apply":
        setState((s) => {
          s.transfer.from = readInput("tr-from").trim();
          s.transfer.to = readInput("tr-to").trim();
          s.transfer.maxTransfers = Number(readInput("tr-max")) || 0;
        });
        break;
    }
  });
  document.body.addEventListener("change", (ev) => {
    const target = ev.target instanceof HTMLElement ? ev.target : null;
    if (target === null) return;
    switch (target.id) {
      case "fc-direction":
        setState((s) => {
          s.forecast.direction = (target as HTMLSelectElement).value as Direction;
        });
        break;
      case "fc-date":
        setState((s) => {
          const d = (target as HTMLInputElement).value.trim();
          s.forecast.date = d === "" ? null : d;
        });
        break;
      case "acc-budget":
        setState((s) => {
          s.accessibility.budgetMin = Number((target as HTMLInputElement).value) || 0;
        });
        break;
      case "acc-min":
        setState((s) => {
          const v = (target as HTMLInputElement).value.trim();
          s.accessibility.minSamples = v === "" ? null : Number(v) || 1;
        });
        break;
    }
  });
  window.addEventListener("hashchange", () => {
    state = decodeState(window.location.hash);
    void render();
  });
}

export function start(): void {
  if (window.location.hash === "") {
    state = defaultState();
    syncUrl();
  }
  wireEvents();
  void render();
}

start();
