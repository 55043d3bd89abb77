/** Pure projection math for the Pareto scatter: world-to-viewport scaling,
 * per-objective "better" direction, and the baseline overlay curve. */

import { MINIMIZED, type ObjectiveName, type ObjectiveVector, type ParetoPoint } from "./types.js";

export interface Viewport {
  width: number;
  height: number;
  margin: number;
}

export interface PlacedPoint {
  px: number;
  py: number;
  x: number;
  y: number;
  ruleset_id: string;
}

export interface PlacedOverlayPoint {
  px: number;
  py: number;
  share: number;
}

export function betterDirection(objective: ObjectiveName): "lower" | "higher" {
  return MINIMIZED.includes(objective) ? "lower" : "higher";
}

export function axisLabel(objective: ObjectiveName): string {
  const arrow = betterDirection(objective) === "lower" ? "↓ better" : "↑ better";
  return `${objective} (${arrow})`;
}

export interface Extent {
  min: number;
  max: number;
}

export function extent(values: number[]): Extent {
  if (values.length === 0) return { min: 0, max: 1 };
  let min = values[0];
  let max = values[0];
  for (const v of values) {
    if (v < min) min = v;
    if (v > max) max = v;
  }
  if (min === max) {
    // degenerate span: widen so the point sits mid-axis
    return { min: min - 0.5, max: max + 0.5 };
  }
  return { min, max };
}

function scale(value: number, e: Extent, lo: number, hi: number): number {
  return lo + ((value - e.min) / (e.max - e.min)) * (hi - lo);
}

export interface BaselineSample {
  share: number;
  objectives: ObjectiveVector;
}

/** Shares 0..1 in 0.05 steps, matching the service's baseline endpoint. */
export function baselineShares(step = 0.05): number[] {
  const out: number[] = [];
  for (let i = 0; Math.round(i * 1000) <= 1000; i += step) {
    out.push(Math.round(i * 100) / 100);
  }
  return out;
}

export function placePoints(
  points: ParetoPoint[],
  baseline: BaselineSample[],
  xObjective: ObjectiveName,
  yObjective: ObjectiveName,
  viewport: Viewport,
): { points: PlacedPoint[]; overlay: PlacedOverlayPoint[] } {
  const xs = [
    ...points.map((p) => p.x),
    ...baseline.map((b) => b.objectives[xObjective]),
  ];
  const ys = [
    ...points.map((p) => p.y),
    ...baseline.map((b) => b.objectives[yObjective]),
  ];
  const ex = extent(xs);
  const ey = extent(ys);
  const left = viewport.margin;
  const right = viewport.width - viewport.margin;
  const top = viewport.margin;
  const bottom = viewport.height - viewport.margin;
  return {
    points: points.map((p) => ({
      px: scale(p.x, ex, left, right),
      py: scale(p.y, ey, bottom, top), // SVG y grows downward
      x: p.x,
      y: p.y,
      ruleset_id: p.ruleset_id,
    })),
    overlay: baseline.map((b) => ({
      px: scale(b.objectives[xObjective], ex, left, right),
      py: scale(b.objectives[yObjective], ey, bottom, top),
      share: b.share,
    })),
  };
}
