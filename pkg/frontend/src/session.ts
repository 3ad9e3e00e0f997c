// Session state: everything the UI shows derives from server events
// folded into a SessionView.  The view renders each event exactly once
// and in order (stale or duplicate batches are dropped), and a page
// reload can reconstruct the latest snapshot from the result endpoint.

import type {
  EventStreamHandlers,
  EventSubscription,
} from "./api.js";
import type {
  ProgressEvent,
  Relaxation,
  ResultResponse,
  SessionState,
  StartQueryRequest,
  StartQueryResponse,
  TerminalEvent,
} from "./types.js";

export interface TrajectoryPoint {
  batch: number;
  n: number;
  estimate: number | null;
  errorRate: number | null;
  done: boolean;
}

export class SessionView {
  queryId: string | null = null;
  queryText = "";
  confidence = 0.95;
  state: SessionState = "idle";
  stopRequested = false;
  readonly trajectory: TrajectoryPoint[] = [];
  lastEvent: ProgressEvent | null = null;
  diagnosis: Relaxation[] | null = null;
  error: string | null = null;

  private listeners: Array<() => void> = [];

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const fn of this.listeners) fn();
  }

  start(queryId: string, text: string, confidence: number): void {
    this.queryId = queryId;
    this.queryText = text;
    this.confidence = confidence;
    this.state = "running";
    this.stopRequested = false;
    this.trajectory.length = 0;
    this.lastEvent = null;
    this.diagnosis = null;
    this.error = null;
    this.emit();
  }

  /** Fold one progress event; returns false when dropped (stale/duplicate). */
  applyProgress(ev: ProgressEvent): boolean {
    if (this.state !== "running") return false;
    if (this.lastEvent !== null && ev.batch <= this.lastEvent.batch) return false;
    this.lastEvent = ev;
    this.trajectory.push({
      batch: ev.batch,
      n: ev.n,
      estimate: ev.estimate,
      errorRate: ev.error_rate,
      done: ev.done,
    });
    this.diagnosis = ev.diagnosis;
    if (ev.done) this.state = "done";
    this.emit();
    return true;
  }

  applyTerminal(terminal: TerminalEvent): void {
    if (this.state === "running") {
      const state = terminal.state as SessionState;
      this.state = state === "done" || state === "cancelled" || state === "failed"
        ? state
        : "failed";
    }
    if (terminal.error) this.error = terminal.error.message;
    this.emit();
  }

  fail(message: string): void {
    this.state = "failed";
    this.error = message;
    this.emit();
  }

  /** Rebuild the latest snapshot after a page reload. */
  restore(queryId: string, result: ResultResponse): void {
    this.queryId = queryId;
    this.state = result.state as SessionState;
    this.trajectory.length = 0;
    this.lastEvent = result.event;
    this.diagnosis = result.event?.diagnosis ?? null;
    this.error = result.error?.message ?? null;
    if (result.event) {
      this.trajectory.push({
        batch: result.event.batch,
        n: result.event.n,
        estimate: result.event.estimate,
        errorRate: result.event.error_rate,
        done: result.event.done,
      });
    }
    this.emit();
  }
}

/** The slice of the client a runner needs; tests substitute a fake. */
export interface QueryService {
  startQuery(datasetId: string, req: StartQueryRequest): Promise<StartQueryResponse>;
  cancelQuery(queryId: string): Promise<{ state: string }>;
  result(queryId: string, exact?: boolean): Promise<ResultResponse>;
  subscribe(queryId: string, handlers: EventStreamHandlers): EventSubscription;
}

/** Drives one query session: start, stream, stop, restore. */
export class QueryRunner {
  private subscription: EventSubscription | null = null;

  constructor(
    private service: QueryService,
    readonly view: SessionView,
  ) {}

  async run(datasetId: string, req: StartQueryRequest): Promise<string> {
    this.dispose();
    const started = await this.service.startQuery(datasetId, req);
    this.view.start(started.id, req.text, started.confidence);
    this.listen(started.id);
    return started.id;
  }

  /** Issue the cancel; the in-flight batch may still deliver one point. */
  async stop(): Promise<string | null> {
    const { queryId, state } = this.view;
    if (queryId === null || state !== "running" || this.view.stopRequested) return null;
    this.view.stopRequested = true;
    const response = await this.service.cancelQuery(queryId);
    return response.state;
  }

  async restore(queryId: string): Promise<void> {
    const result = await this.service.result(queryId);
    this.view.restore(queryId, result);
    if (result.state === "running") this.listen(queryId);
  }

  private listen(queryId: string): void {
    this.subscription = this.service.subscribe(queryId, {
      onProgress: (ev) => this.view.applyProgress(ev),
      onTerminal: (terminal) => this.view.applyTerminal(terminal),
      onError: (err) => this.view.fail(err instanceof Error ? err.message : String(err)),
    });
  }

  dispose(): void {
    this.subscription?.close();
    this.subscription = null;
  }
}
