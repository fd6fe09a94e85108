/**
 * Diverging color scale centered at 0 (blue -> white -> red), used by the
 * map view so negative and positive component values read symmetrically.
 */

export interface Rgb {
  r: number;
  g: number;
  b: number;
}

const NEG: Rgb = { r: 33, g: 102, b: 172 }; // blue
const MID: Rgb = { r: 247, g: 247, b: 247 }; // near-white
const POS: Rgb = { r: 178, g: 24, b: 43 }; // red

function lerp(a: number, b: number, t: number): number {
  return Math.round(a + (b - a) * t);
}

function mix(a: Rgb, b: Rgb, t: number): Rgb {
  return { r: lerp(a.r, b.r, t), g: lerp(a.g, b.g, t), b: lerp(a.b, b.b, t) };
}

/**
 * Map a value to a color given the scale's half-range (the largest |value|
 * in the data).  value 0 -> midpoint; +/-halfRange -> full saturation.
 * A zero half-range (all values equal) yields the uniform midpoint color.
 */
export function divergingColor(value: number, halfRange: number): Rgb {
  if (halfRange <= 0 || !Number.isFinite(value)) return { ...MID };
  const t = Math.min(1, Math.max(-1, value / halfRange));
  return t < 0 ? mix(MID, NEG, -t) : mix(MID, POS, t);
}

export function toCss(c: Rgb): string {
  return `rgb(${c.r},${c.g},${c.b})`;
}

/** Symmetric half-range for a set of values (max absolute value). */
export function halfRangeOf(values: number[]): number {
  let m = 0;
  for (const v of values) {
    if (Number.isFinite(v)) m = Math.max(m, Math.abs(v));
  }
  return m;
}
