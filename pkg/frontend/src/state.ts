/**
 * Explorer state: slider values for the top components (in units of
 * sqrt(eigenvalue), clamped to +/-3 sigma), the selected component, the
 * selected item, and the view mode.  The whole state round-trips through
 * a URL query string so any view is shareable and a refresh reproduces it.
 */

export const SLIDER_COUNT = 16;
export const SLIDER_LIMIT = 3;

export type ViewMode = "sweep" | "map" | "extremes";

export interface ExplorerState {
  /** Slider positions in sigma units, length SLIDER_COUNT. */
  values: number[];
  /** 1-based selected component. */
  component: number;
  /** Selected item id, if any. */
  itemId: string | null;
  mode: ViewMode;
}

export function defaultState(): ExplorerState {
  return {
    values: new Array(SLIDER_COUNT).fill(0),
    component: 1,
    itemId: null,
    mode: "sweep",
  };
}

export function clampSigma(v: number): number {
  if (!Number.isFinite(v)) return 0;
  return Math.min(SLIDER_LIMIT, Math.max(-SLIDER_LIMIT, v));
}

export function withValue(
  state: ExplorerState,
  index: number,
  value: number,
): ExplorerState {
  const values = state.values.slice();
  if (index >= 0 && index < values.length) values[index] = clampSigma(value);
  return { ...state, values };
}

const MODES: ViewMode[] = ["sweep", "map", "extremes"];

/** Serialize to a query string; zero sliders are omitted to keep URLs short. */
export function serializeState(state: ExplorerState): string {
  const q = new URLSearchParams();
  const nonZero = state.values
    .map((v, i) => [i, v] as const)
    .filter(([, v]) => v !== 0);
  if (nonZero.length > 0) {
    q.set("v", nonZero.map(([i, v]) => `${i}:${v.toFixed(3)}`).join(","));
  }
  q.set("k", String(state.component));
  q.set("mode", state.mode);
  if (state.itemId !== null) q.set("item", state.itemId);
  return q.toString();
}

export function deserializeState(query: string): ExplorerState {
  const q = new URLSearchParams(query);
  const state = defaultState();
  const v = q.get("v");
  if (v) {
    for (const pair of v.split(",")) {
      const [idx, val] = pair.split(":");
      const i = Number.parseInt(idx, 10);
      const x = Number.parseFloat(val);
      if (Number.isInteger(i) && i >= 0 && i < SLIDER_COUNT && Number.isFinite(x)) {
        state.values[i] = clampSigma(x);
      }
    }
  }
  const k = Number.parseInt(q.get("k") ?? "", 10);
  if (Number.isInteger(k) && k >= 1) state.component = k;
  const mode = q.get("mode");
  if (mode && (MODES as string[]).includes(mode)) state.mode = mode as ViewMode;
  state.itemId = q.get("item");
  return state;
}

/**
 * Convert sigma-unit slider positions into component values (units of
 * sqrt(eigenvalue)) for the decode request.  Components beyond the slider
 * count stay at the mean (zero).
 */
export function sliderToComponentValues(
  sigmas: number[],
  eigenvalues: number[],
): number[] {
  return sigmas.map((s, i) => {
    const lambda = eigenvalues[i] ?? 0;
    return s * Math.sqrt(Math.max(lambda, 0));
  });
}
