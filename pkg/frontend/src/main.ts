/**
 * DOM wiring for the explorer.  All latent-space logic lives in the
 * imported modules; this file only reads/writes the document.
 *
 * Views: sweep (sliders + live decode), map (diverging-color point map for
 * the selected component), extremes (lowest/highest galleries).  The full
 * view state round-trips through the URL hash query so refresh reproduces
 * the view; the page never mutates server state.
 */

import { ApiClient, MapResponse } from "./api.js";
import { divergingColor, halfRangeOf, toCss } from "./color.js";
import { fitProjector, hitTest } from "./layout.js";
import { DecodeScheduler } from "./scheduler.js";
import {
  ExplorerState,
  SLIDER_COUNT,
  SLIDER_LIMIT,
  defaultState,
  deserializeState,
  serializeState,
  sliderToComponentValues,
  withValue,
} from "./state.js";

const api = new ApiClient();

let state: ExplorerState = defaultState();
let eigenvalues: number[] = [];
let componentCount = 0;
let georeferenced = false;

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function pushStateToUrl(): void {
  const q = serializeState(state);
  history.replaceState(null, "", `#${q}`);
}

function readStateFromUrl(): void {
  state = deserializeState(window.location.hash.replace(/^#/, ""));
}

// --- error banner ---------------------------------------------------------

function showError(message: string): void {
  const banner = $("error-banner");
  banner.textContent = message;
  banner.classList.remove("hidden");
  document
    .querySelectorAll<HTMLInputElement>("#sliders input")
    .forEach((s) => (s.disabled = true));
}

function clearError(): void {
  $("error-banner").classList.add("hidden");
  document
    .querySelectorAll<HTMLInputElement>("#sliders input")
    .forEach((s) => (s.disabled = false));
}

// --- sweep view -----------------------------------------------------------

const scheduler = new DecodeScheduler<Blob>(
  (blob) => {
    clearError();
    const img = $("decode-image") as HTMLImageElement;
    const url = URL.createObjectURL(blob);
    const old = img.src;
    img.src = url;
    if (old.startsWith("blob:")) URL.revokeObjectURL(old);
  },
  () => showError("decode failed: service unreachable"),
);

function requestDecode(immediate = false): void {
  const values = sliderToComponentValues(state.values, eigenvalues);
  const task = () => api.decode(values);
  if (immediate) scheduler.requestNow(task);
  else scheduler.request(task);
}

function buildSliders(): void {
  const host = $("sliders");
  host.textContent = "";
  const n = Math.min(SLIDER_COUNT, componentCount);
  for (let i = 0; i < n; i++) {
    const row = document.createElement("label");
    row.className = "slider-row";
    const name = document.createElement("span");
    name.textContent = `v${i + 1}`;
    const input = document.createElement("input");
    input.type = "range";
    input.min = String(-SLIDER_LIMIT);
    input.max = String(SLIDER_LIMIT);
    input.step = "0.05";
    input.value = String(state.values[i]);
    const readout = document.createElement("span");
    readout.className = "readout";
    readout.textContent = state.values[i].toFixed(2);
    input.addEventListener("input", () => {
      state = withValue(state, i, Number.parseFloat(input.value));
      readout.textContent = state.values[i].toFixed(2);
      pushStateToUrl();
      requestDecode();
    });
    row.append(name, input, readout);
    host.append(row);
  }
  const reset = document.createElement("button");
  reset.textContent = "reset to mean";
  reset.addEventListener("click", () => {
    state = { ...state, values: new Array(SLIDER_COUNT).fill(0) };
    pushStateToUrl();
    buildSliders();
    requestDecode(true);
  });
  host.append(reset);
}

// --- map view -------------------------------------------------------------

async function renderMap(): Promise<void> {
  const canvas = $("map-canvas") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  let doc: MapResponse;
  try {
    doc = await api.map(state.component);
  } catch {
    showError("map failed: service unreachable");
    return;
  }
  clearError();
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const proj = fitProjector(doc.points, {
    width: canvas.width,
    height: canvas.height,
    padding: 16,
  });
  const half = halfRangeOf(doc.points.map((p) => p.value));
  const canvasPoints = doc.points.map((p) => proj.toCanvas(p.x, p.y));
  doc.points.forEach((p, i) => {
    ctx.fillStyle = toCss(divergingColor(p.value, half));
    ctx.beginPath();
    ctx.arc(canvasPoints[i].cx, canvasPoints[i].cy, 5, 0, 2 * Math.PI);
    ctx.fill();
  });

  const tooltip = $("map-tooltip");
  canvas.onmousemove = (ev) => {
    const rect = canvas.getBoundingClientRect();
    const i = hitTest(canvasPoints, ev.clientX - rect.left, ev.clientY - rect.top, 8);
    if (i < 0) {
      tooltip.classList.add("hidden");
      return;
    }
    tooltip.textContent = `${doc.points[i].id}: ${doc.points[i].value.toFixed(3)}`;
    tooltip.style.left = `${ev.clientX - rect.left + 12}px`;
    tooltip.style.top = `${ev.clientY - rect.top + 12}px`;
    tooltip.classList.remove("hidden");
  };
  canvas.onclick = (ev) => {
    const rect = canvas.getBoundingClientRect();
    const i = hitTest(canvasPoints, ev.clientX - rect.left, ev.clientY - rect.top, 8);
    if (i < 0) return;
    state = { ...state, itemId: doc.points[i].id };
    pushStateToUrl();
    const img = $("item-image") as HTMLImageElement;
    img.src = api.itemImageUrl(doc.points[i].id);
    img.classList.remove("hidden");
  };
}

// --- extremes view --------------------------------------------------------

async function renderExtremes(): Promise<void> {
  let doc;
  try {
    doc = await api.extremes(state.component, 5);
  } catch {
    showError("extremes failed: service unreachable");
    return;
  }
  clearError();
  for (const [hostId, entries] of [
    ["extremes-low", doc.lowest],
    ["extremes-high", doc.highest],
  ] as const) {
    const host = $(hostId);
    host.textContent = "";
    for (const e of entries) {
      const fig = document.createElement("figure");
      const img = document.createElement("img");
      img.src = e.image_url;
      img.alt = e.id;
      const cap = document.createElement("figcaption");
      cap.textContent = `${e.id} (${e.value.toFixed(2)})`;
      fig.append(img, cap);
      host.append(fig);
    }
  }
}

// --- view switching -------------------------------------------------------

function applyMode(): void {
  for (const mode of ["sweep", "map", "extremes"] as const) {
    $(`view-${mode}`).classList.toggle("hidden", state.mode !== mode);
    const tab = $(`tab-${mode}`);
    tab.classList.toggle("active", state.mode === mode);
  }
  if (state.mode === "map") void renderMap();
  if (state.mode === "extremes") void renderExtremes();
}

function wireTabs(): void {
  for (const mode of ["sweep", "map", "extremes"] as const) {
    $(`tab-${mode}`).addEventListener("click", () => {
      state = { ...state, mode };
      pushStateToUrl();
      applyMode();
    });
  }
  const sel = $("component-select") as HTMLSelectElement;
  sel.addEventListener("change", () => {
    state = { ...state, component: Number.parseInt(sel.value, 10) };
    pushStateToUrl();
    applyMode();
  });
}

// --- boot -----------------------------------------------------------------

async function boot(): Promise<void> {
  readStateFromUrl();
  try {
    const [health, comps, latents] = await Promise.all([
      api.health(),
      api.components(),
      api.latents(1),
    ]);
    componentCount = health.components;
    eigenvalues = comps.eigenvalues;
    georeferenced = latents.rows.length > 0 && latents.rows[0].x !== null;
  } catch {
    showError("cannot reach the explorer service");
    return;
  }
  if (!georeferenced) $("tab-map").classList.add("hidden");
  const sel = $("component-select") as HTMLSelectElement;
  const nSel = Math.min(SLIDER_COUNT, componentCount);
  for (let k = 1; k <= nSel; k++) {
    const opt = document.createElement("option");
    opt.value = String(k);
    opt.textContent = `component ${k}`;
    sel.append(opt);
  }
  sel.value = String(Math.min(state.component, nSel));
  buildSliders();
  wireTabs();
  applyMode();
  requestDecode(true);
}

void boot();
