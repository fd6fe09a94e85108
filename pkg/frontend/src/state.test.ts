import { describe, expect, it } from "vitest";

import {
  SLIDER_COUNT,
  clampSigma,
  defaultState,
  deserializeState,
  serializeState,
  sliderToComponentValues,
  withValue,
} from "./state.js";

describe("state defaults", () => {
  it("starts at the mean in sweep mode", () => {
    const s = defaultState();
    expect(s.values).toHaveLength(SLIDER_COUNT);
    expect(s.values.every((v) => v === 0)).toBe(true);
    expect(s.component).toBe(1);
    expect(s.mode).toBe("sweep");
    expect(s.itemId).toBeNull();
  });
});

describe("clamping", () => {
  it("clamps to +/-3 sigma", () => {
    expect(clampSigma(5)).toBe(3);
    expect(clampSigma(-9)).toBe(-3);
    expect(clampSigma(1.5)).toBe(1.5);
  });

  it("maps non-finite input to 0", () => {
    expect(clampSigma(Number.NaN)).toBe(0);
    expect(clampSigma(Infinity)).toBe(0);
  });

  it("withValue clamps and is immutable", () => {
    const s = defaultState();
    const t = withValue(s, 2, 7);
    expect(t.values[2]).toBe(3);
    expect(s.values[2]).toBe(0);
  });

  it("withValue ignores out-of-range indices", () => {
    const s = defaultState();
    expect(withValue(s, 99, 1).values).toEqual(s.values);
  });
});

describe("URL round trip", () => {
  it("serializes and restores the full state", () => {
    let s = defaultState();
    s = withValue(s, 0, 1.25);
    s = withValue(s, 7, -2.5);
    s = { ...s, component: 3, mode: "map", itemId: "0042" };
    const restored = deserializeState(serializeState(s));
    expect(restored.values[0]).toBeCloseTo(1.25, 3);
    expect(restored.values[7]).toBeCloseTo(-2.5, 3);
    expect(restored.values[1]).toBe(0);
    expect(restored.component).toBe(3);
    expect(restored.mode).toBe("map");
    expect(restored.itemId).toBe("0042");
  });

  it("omits zero sliders from the query", () => {
    expect(serializeState(defaultState())).not.toContain("v=");
  });

  it("survives garbage input", () => {
    const s = deserializeState("v=zz:qq,999:1,-1:2&k=nope&mode=bogus");
    expect(s.values.every((v) => v === 0)).toBe(true);
    expect(s.component).toBe(1);
    expect(s.mode).toBe("sweep");
  });

  it("clamps out-of-range values from the URL", () => {
    const s = deserializeState("v=0:99");
    expect(s.values[0]).toBe(3);
  });
});

describe("sigma to component values", () => {
  it("scales by sqrt(eigenvalue)", () => {
    const out = sliderToComponentValues([2, -1, 0.5], [4, 9, 0]);
    expect(out).toEqual([4, -3, 0]);
  });

  it("treats missing or negative eigenvalues as zero", () => {
    expect(sliderToComponentValues([1, 1], [4])).toEqual([2, 0]);
    expect(sliderToComponentValues([1], [-2])).toEqual([0]);
  });
});
