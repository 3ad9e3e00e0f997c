// Chart data model plus a small canvas renderer.  The x-axis is n (rows
// processed), not wall time, so the 1/sqrt(n) shrinkage of the shaded
// confidence band is visible directly: quadruple the rows, halve the band.

import type { TrajectoryPoint } from "./session.js";

export interface ChartPoint {
  n: number;
  estimate: number | null;
  /** Full band width, 2x the interval half-width; the primary band datum. */
  width: number | null;
  lo: number | null;
  hi: number | null;
}

export class ChartModel {
  readonly points: ChartPoint[] = [];

  static fromTrajectory(trajectory: readonly TrajectoryPoint[]): ChartModel {
    const model = new ChartModel();
    for (const p of trajectory) model.push(p);
    return model;
  }

  push(p: TrajectoryPoint): void {
    const hasBand = p.estimate !== null && p.errorRate !== null;
    this.points.push({
      n: p.n,
      estimate: p.estimate,
      width: hasBand ? 2 * (p.errorRate as number) : null,
      lo: hasBand ? (p.estimate as number) - (p.errorRate as number) : null,
      hi: hasBand ? (p.estimate as number) + (p.errorRate as number) : null,
    });
  }

  /** Full band width at the point with this n. */
  bandWidthAt(n: number): number | null {
    const point = this.points.find((p) => p.n === n);
    return point ? point.width : null;
  }

  bounds(): { nMax: number; yMin: number; yMax: number } | null {
    const drawable = this.points.filter((p) => p.estimate !== null);
    if (!drawable.length) return null;
    const los = drawable.map((p) => p.lo ?? (p.estimate as number));
    const his = drawable.map((p) => p.hi ?? (p.estimate as number));
    return {
      nMax: Math.max(...this.points.map((p) => p.n)),
      yMin: Math.min(...los),
      yMax: Math.max(...his),
    };
  }

  render(canvas: HTMLCanvasElement): void {
    const ctx = canvas.getContext?.("2d");
    if (!ctx) return;
    const { width, height } = canvas;
    ctx.clearRect(0, 0, width, height);
    const bounds = this.bounds();
    if (!bounds) {
      ctx.fillStyle = "#667";
      ctx.font = "13px system-ui, sans-serif";
      ctx.fillText("waiting for estimates…", 16, height / 2);
      return;
    }
    const pad = { left: 54, right: 12, top: 10, bottom: 26 };
    const spanY = bounds.yMax - bounds.yMin || 1;
    const yLo = bounds.yMin - spanY * 0.1;
    const yHi = bounds.yMax + spanY * 0.1;
    const x = (n: number) => pad.left + (n / bounds.nMax) * (width - pad.left - pad.right);
    const y = (v: number) =>
      height - pad.bottom - ((v - yLo) / (yHi - yLo)) * (height - pad.top - pad.bottom);

    const banded = this.points.filter((p) => p.lo !== null && p.hi !== null);
    if (banded.length > 1) {
      ctx.beginPath();
      banded.forEach((p, i) =>
        i ? ctx.lineTo(x(p.n), y(p.hi as number)) : ctx.moveTo(x(p.n), y(p.hi as number)));
      for (let i = banded.length - 1; i >= 0; i--) {
        ctx.lineTo(x(banded[i].n), y(banded[i].lo as number));
      }
      ctx.closePath();
      ctx.fillStyle = "rgba(96, 130, 255, 0.18)";
      ctx.fill();
    }

    const line = this.points.filter((p) => p.estimate !== null);
    if (line.length) {
      ctx.beginPath();
      line.forEach((p, i) =>
        i ? ctx.lineTo(x(p.n), y(p.estimate as number)) : ctx.moveTo(x(p.n), y(p.estimate as number)));
      ctx.strokeStyle = "#3458d4";
      ctx.lineWidth = 2;
      ctx.stroke();
      const last = line[line.length - 1];
      ctx.beginPath();
      ctx.arc(x(last.n), y(last.estimate as number), 3.5, 0, Math.PI * 2);
      ctx.fillStyle = "#3458d4";
      ctx.fill();
    }

    ctx.strokeStyle = "#99a";
    ctx.lineWidth = 1;
    ctx.beginPath();
    ctx.moveTo(pad.left, pad.top);
    ctx.lineTo(pad.left, height - pad.bottom);
    ctx.lineTo(width - pad.right, height - pad.bottom);
    ctx.stroke();
    ctx.fillStyle = "#445";
    ctx.font = "11px system-ui, sans-serif";
    ctx.fillText(String(yHi.toPrecision(6)), 4, pad.top + 8);
    ctx.fillText(String(yLo.toPrecision(6)), 4, height - pad.bottom);
    ctx.fillText(`n = ${bounds.nMax}`, width - pad.right - 70, height - 8);
  }
}
