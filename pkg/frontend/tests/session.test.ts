import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import type { EventStreamHandlers, EventSubscription } from "../src/api.js";
import { QueryRunner, SessionView } from "../src/session.js";
import type { QueryService } from "../src/session.js";
import type { ProgressEvent, ResultResponse } from "../src/types.js";

function hoeffding(n: number, p = 0.95, width = 1): number {
  return width * Math.sqrt(Math.log(2 / (1 - p)) / (2 * n));
}

function makeEvents(count: number, m = 1000): ProgressEvent[] {
  return Array.from({ length: count }, (_, i) => {
    const batch = i + 1;
    const n = Math.round(((i + 1) * m) / count);
    return {
      batch,
      n,
      m,
      estimate: 50 + 10 / batch,
      error_rate: hoeffding(n),
      confidence: 0.95,
      fraction: n / m,
      done: batch === count,
      diagnosis: null,
    };
  });
}

/** Mock server honoring the cancellation latency contract: after a cancel
 * is acknowledged, at most the in-flight batch's event still arrives. */
class FakeService implements QueryService {
  cancels: string[] = [];
  emitted = 0;
  private cancelRequested = false;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private events: ProgressEvent[],
    private intervalMs = 100, // 10 Hz
  ) {}

  async startQuery() {
    return { id: "q-1", seed: 1, sample_pct: 1.0, confidence: 0.95 };
  }

  async cancelQuery(queryId: string) {
    this.cancels.push(queryId);
    this.cancelRequested = true;
    return { state: "cancelled" };
  }

  async result(): Promise<ResultResponse> {
    const last = this.emitted ? this.events[this.emitted - 1] : null;
    const state = this.cancelRequested
      ? "cancelled"
      : this.emitted === this.events.length ? "done" : "running";
    return { state, event: last };
  }

  subscribe(_queryId: string, handlers: EventStreamHandlers): EventSubscription {
    this.timer = setInterval(() => {
      if (this.cancelRequested) {
        if (this.emitted < this.events.length) {
          handlers.onProgress(this.events[this.emitted++]); // in-flight batch
        }
        this.stop();
        handlers.onTerminal({ state: "cancelled" });
        return;
      }
      if (this.emitted < this.events.length) {
        handlers.onProgress(this.events[this.emitted++]);
        if (this.emitted === this.events.length) {
          this.stop();
          handlers.onTerminal({ state: "done" });
        }
      }
    }, this.intervalMs);
    return { close: () => this.stop() };
  }

  private stop(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
  }
}

describe("SessionView under a 10 Hz synthetic stream", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("renders all 100 events exactly once, in order", async () => {
    const events = makeEvents(100);
    const service = new FakeService(events);
    const view = new SessionView();
    let renders = 0;
    view.onChange(() => renders++);
    const runner = new QueryRunner(service, view);
    await runner.run("ds", { text: "q", confidence: 0.95 });

    await vi.advanceTimersByTimeAsync(100 * 100 + 10);

    expect(view.trajectory.map((p) => p.batch)).toEqual(events.map((e) => e.batch));
    expect(view.trajectory).toHaveLength(100);
    const ns = view.trajectory.map((p) => p.n);
    expect([...ns].sort((a, b) => a - b)).toEqual(ns);
    expect(new Set(view.trajectory.map((p) => p.batch)).size).toBe(100);
    expect(view.state).toBe("done");
    expect(renders).toBeGreaterThanOrEqual(100);
  });

  it("stop issues the cancel and at most one further point renders", async () => {
    const service = new FakeService(makeEvents(100));
    const view = new SessionView();
    const runner = new QueryRunner(service, view);
    await runner.run("ds", { text: "q", confidence: 0.95 });

    await vi.advanceTimersByTimeAsync(100 * 40 + 10); // 40 events in
    const before = view.trajectory.length;
    expect(before).toBe(40);

    const ack = await runner.stop();
    expect(ack).toBe("cancelled");
    expect(service.cancels).toEqual(["q-1"]);

    await vi.advanceTimersByTimeAsync(5_000);
    expect(view.trajectory.length - before).toBeLessThanOrEqual(1);
    expect(view.state).toBe("cancelled");

    // frozen after the terminal event
    const frozen = view.trajectory.length;
    await vi.advanceTimersByTimeAsync(5_000);
    expect(view.trajectory.length).toBe(frozen);
  });

  it("stop is a no-op once the session is done", async () => {
    const service = new FakeService(makeEvents(5));
    const view = new SessionView();
    const runner = new QueryRunner(service, view);
    await runner.run("ds", { text: "q", confidence: 0.95 });
    await vi.advanceTimersByTimeAsync(10_000);
    expect(view.state).toBe("done");
    expect(await runner.stop()).toBeNull();
    expect(service.cancels).toEqual([]);
  });
});

describe("SessionView event folding", () => {
  it("drops duplicates and stale batches", () => {
    const [e1, e2, e3] = makeEvents(3);
    const view = new SessionView();
    view.start("q", "text", 0.95);
    expect(view.applyProgress(e1)).toBe(true);
    expect(view.applyProgress(e1)).toBe(false); // duplicate
    expect(view.applyProgress(e3)).toBe(true);
    expect(view.applyProgress(e2)).toBe(false); // out of order
    expect(view.trajectory.map((p) => p.batch)).toEqual([1, 3]);
  });

  it("ignores progress after a terminal event", () => {
    const [e1, e2] = makeEvents(3);
    const view = new SessionView();
    view.start("q", "text", 0.95);
    view.applyProgress(e1);
    view.applyTerminal({ state: "cancelled" });
    expect(view.state).toBe("cancelled");
    expect(view.applyProgress(e2)).toBe(false);
    expect(view.trajectory).toHaveLength(1);
  });

  it("mirrors the latest diagnosis and clears it when satisfied", () => {
    const [e1, e2] = makeEvents(3);
    const view = new SessionView();
    view.start("q", "text", 0.95);
    view.applyProgress({ ...e1, diagnosis: [{ labels: ["Salary-Low"], count: 4 }] });
    expect(view.diagnosis).toEqual([{ labels: ["Salary-Low"], count: 4 }]);
    view.applyProgress({ ...e2, diagnosis: null });
    expect(view.diagnosis).toBeNull();
  });

  it("a run reuses editor state but resets the trajectory", () => {
    const [e1] = makeEvents(1);
    const view = new SessionView();
    view.start("q1", "text", 0.95);
    view.applyProgress(e1);
    view.start("q2", "text", 0.9);
    expect(view.trajectory).toHaveLength(0);
    expect(view.state).toBe("running");
    expect(view.confidence).toBe(0.9);
  });
});

describe("snapshot reconstruction", () => {
  it("restore() rebuilds the latest snapshot from the result endpoint", async () => {
    const events = makeEvents(10);
    const service = new FakeService(events);
    service.emitted = 10; // pretend the run already finished server-side
    const view = new SessionView();
    const runner = new QueryRunner(service, view);
    await runner.restore("q-1");
    expect(view.state).toBe("done");
    expect(view.trajectory).toHaveLength(1);
    expect(view.lastEvent?.batch).toBe(10);
  });

  it("restore() of a running session resubscribes", async () => {
    vi.useFakeTimers();
    try {
      const service = new FakeService(makeEvents(10));
      service.emitted = 4;
      const view = new SessionView();
      const runner = new QueryRunner(service, view);
      await runner.restore("q-1");
      expect(view.state).toBe("running");
      await vi.advanceTimersByTimeAsync(2_000);
      expect(view.state).toBe("done");
      expect(view.trajectory.length).toBeGreaterThan(1);
    } finally {
      vi.useRealTimers();
    }
  });
});
