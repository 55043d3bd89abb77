import { describe, expect, it } from "vitest";

import {
  axisLabel,
  baselineShares,
  betterDirection,
  extent,
  placePoints,
  type BaselineSample,
} from "../src/projection.js";
import type { ObjectiveVector, ParetoPoint } from "../src/types.js";

const VIEW = { width: 200, height: 100, margin: 10 };

function vec(overrides: Partial<ObjectiveVector>): ObjectiveVector {
  return {
    complexity: 0,
    feature_count: 0,
    missed_remark_count: 0,
    missed_remark_log: 0,
    saved_record_count: 0,
    saved_records_trimmed_mean: 0,
    saved_java_loc: 0,
    ...overrides,
  };
}

describe("better direction", () => {
  it("minimized objectives improve downward", () => {
    expect(betterDirection("missed_remark_log")).toBe("lower");
    expect(betterDirection("complexity")).toBe("lower");
  });

  it("maximized objectives improve upward", () => {
    expect(betterDirection("saved_record_count")).toBe("higher");
  });

  it("axis labels carry the orientation", () => {
    expect(axisLabel("complexity")).toContain("↓ better");
    expect(axisLabel("saved_java_loc")).toContain("↑ better");
  });
});

describe("extent", () => {
  it("covers the value range", () => {
    expect(extent([3, 1, 2])).toEqual({ min: 1, max: 3 });
  });

  it("widens degenerate spans", () => {
    const e = extent([4, 4]);
    expect(e.min).toBeLessThan(4);
    expect(e.max).toBeGreaterThan(4);
  });

  it("defaults when empty", () => {
    expect(extent([])).toEqual({ min: 0, max: 1 });
  });
});

describe("baselineShares", () => {
  it("spans 0..1 in 0.05 steps", () => {
    const shares = baselineShares();
    expect(shares[0]).toBe(0);
    expect(shares[shares.length - 1]).toBe(1);
    expect(shares).toHaveLength(21);
  });
});

describe("placePoints", () => {
  const points: ParetoPoint[] = [
    { x: 0, y: 0, ruleset_id: "rs-1" },
    { x: 10, y: 5, ruleset_id: "rs-2" },
  ];

  it("maps world extremes onto the padded viewport", () => {
    const placed = placePoints(points, [], "missed_remark_log", "saved_record_count", VIEW);
    const [a, b] = placed.points;
    expect(a.px).toBe(10);
    expect(b.px).toBe(190);
    // larger y lands higher on screen (smaller pixel y)
    expect(b.py).toBeLessThan(a.py);
    expect(a.py).toBe(90);
  });

  it("includes baseline samples in the scaling domain", () => {
    const baseline: BaselineSample[] = [
      { share: 0.5, objectives: vec({ missed_remark_log: 20, saved_record_count: 1 }) },
    ];
    const placed = placePoints(points, baseline, "missed_remark_log", "saved_record_count", VIEW);
    expect(Math.max(...placed.points.map((p) => p.px))).toBeLessThan(190);
    expect(placed.overlay[0].px).toBe(190);
  });
});
