import { describe, expect, it } from "vitest";

import { ChartModel } from "../src/chart.js";
import type { TrajectoryPoint } from "../src/session.js";

function hoeffding(n: number, p = 0.95, width = 1): number {
  return width * Math.sqrt(Math.log(2 / (1 - p)) / (2 * n));
}

function point(n: number, estimate: number | null, errorRate: number | null,
               batch = n, done = false): TrajectoryPoint {
  return { batch, n, estimate, errorRate, done };
}

describe("ChartModel", () => {
  it("band width follows the 1/sqrt(n) law: quadruple n, halve the band", () => {
    const model = ChartModel.fromTrajectory([
      point(100, 50, hoeffding(100)),
      point(400, 50.2, hoeffding(400)),
      point(1600, 50.1, hoeffding(1600)),
    ]);
    const w100 = model.bandWidthAt(100)!;
    const w400 = model.bandWidthAt(400)!;
    const w1600 = model.bandWidthAt(1600)!;
    expect(w400 / w100).toBe(0.5);
    expect(w1600 / w400).toBe(0.5);
  });

  it("a done event closes the band to width zero", () => {
    const model = ChartModel.fromTrajectory([
      point(500, 42, hoeffding(500)),
      point(1000, 41.9, 0, 2, true),
    ]);
    expect(model.bandWidthAt(1000)).toBe(0);
  });

  it("points without an estimate carry no band", () => {
    const model = ChartModel.fromTrajectory([
      point(10, null, hoeffding(10)),
      point(20, 5, hoeffding(20)),
    ]);
    expect(model.bandWidthAt(10)).toBeNull();
    expect(model.bandWidthAt(20)).not.toBeNull();
  });

  it("bounds span the band, not just the line", () => {
    const model = ChartModel.fromTrajectory([point(100, 10, 3)]);
    const bounds = model.bounds()!;
    expect(bounds.yMin).toBe(7);
    expect(bounds.yMax).toBe(13);
    expect(bounds.nMax).toBe(100);
  });

  it("empty trajectory has no bounds", () => {
    expect(new ChartModel().bounds()).toBeNull();
  });

  it("bandWidthAt misses return null", () => {
    expect(new ChartModel().bandWidthAt(5)).toBeNull();
  });
});
