import type { Presentation } from "./types";

// Pure view-model helpers.  Model quantities are displayed exactly as the
// server sent them (String(x) of the JSON number); the only arithmetic
// here maps coordinates into screen space.

export type Bounds = [number, number][];

export function defaultBounds(dimension: number): Bounds {
  return Array.from({ length: dimension }, () => [0, 1]);
}

export function presentationDimension(kind: Presentation): number | null {
  if (kind === "color_rgb") return 3;
  if (kind === "point_2d") return 2;
  return null; // raw_vector takes any dimension
}

/** Exact text for a model value — no rounding, no reformatting. */
export function formatValue(x: number): string {
  return String(x);
}

/** color_rgb payloads live in the session bounds; map each channel to
 *  0-255 for the swatch. */
export function swatchColor(x: number[], bounds: Bounds): string {
  const channel = (i: number) => {
    const [lo, hi] = bounds[i];
    const unit = hi > lo ? (x[i] - lo) / (hi - lo) : 0;
    return Math.round(255 * Math.min(1, Math.max(0, unit)));
  };
  return `rgb(${channel(0)}, ${channel(1)}, ${channel(2)})`;
}

/** Position of a point inside its bounding box, as percentages of the
 *  drawing surface (y inverted: larger coordinate is higher). */
export function pointPercent(
  x: number[],
  bounds: Bounds,
): { x: number; y: number } {
  const unit = (i: number) => {
    const [lo, hi] = bounds[i];
    return hi > lo ? (x[i] - lo) / (hi - lo) : 0.5;
  };
  return { x: 100 * unit(0), y: 100 * (1 - unit(1)) };
}
