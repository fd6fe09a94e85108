/** Fit georeferenced points into a canvas viewport (y grows north/up). */

export interface Viewport {
  width: number;
  height: number;
  padding: number;
}

export interface Projector {
  toCanvas(x: number, y: number): { cx: number; cy: number };
}

export function fitProjector(
  points: { x: number; y: number }[],
  view: Viewport,
): Projector {
  if (points.length === 0) {
    return { toCanvas: () => ({ cx: view.width / 2, cy: view.height / 2 }) };
  }
  let xmin = Infinity;
  let xmax = -Infinity;
  let ymin = Infinity;
  let ymax = -Infinity;
  for (const p of points) {
    xmin = Math.min(xmin, p.x);
    xmax = Math.max(xmax, p.x);
    ymin = Math.min(ymin, p.y);
    ymax = Math.max(ymax, p.y);
  }
  const spanX = xmax - xmin;
  const spanY = ymax - ymin;
  const innerW = view.width - 2 * view.padding;
  const innerH = view.height - 2 * view.padding;
  // uniform scale so geometry keeps its aspect ratio
  const scale =
    spanX === 0 && spanY === 0
      ? 1
      : Math.min(
          spanX === 0 ? Infinity : innerW / spanX,
          spanY === 0 ? Infinity : innerH / spanY,
        );
  const offX = view.padding + (innerW - spanX * scale) / 2;
  const offY = view.padding + (innerH - spanY * scale) / 2;
  return {
    toCanvas(x: number, y: number) {
      return {
        cx: offX + (x - xmin) * scale,
        // canvas y grows downward; map y grows northward
        cy: offY + (ymax - y) * scale,
      };
    },
  };
}

/** Index of the point nearest to a canvas position, or -1 if too far. */
export function hitTest(
  canvasPoints: { cx: number; cy: number }[],
  cx: number,
  cy: number,
  radius: number,
): number {
  let best = -1;
  let bestD = radius * radius;
  for (let i = 0; i < canvasPoints.length; i++) {
    const dx = canvasPoints[i].cx - cx;
    const dy = canvasPoints[i].cy - cy;
    const d = dx * dx + dy * dy;
    if (d <= bestD) {
      bestD = d;
      best = i;
    }
  }
  return best;
}
