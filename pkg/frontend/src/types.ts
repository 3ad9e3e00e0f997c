// Wire types shared with the query service.  Field names follow the
// server's event schema exactly.

export interface ProgressEvent {
  batch: number;
  n: number;
  m: number;
  estimate: number | null;
  error_rate: number | null;
  confidence: number;
  fraction: number;
  done: boolean;
  diagnosis: Relaxation[] | null;
}

/** A satisfiable relaxation of an unsatisfied conjunction. */
export interface Relaxation {
  labels: string[];
  count: number;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details?: unknown;
}

export interface TerminalEvent {
  state: string;
  error?: ApiErrorBody;
}

export interface KbSummary {
  source: string;
  tau: number;
  m: number;
  labels: string[];
  ranges: Record<string, [number, number]>;
}

export interface StartQueryRequest {
  text: string;
  confidence?: number;
  sample_pct?: number;
  seed?: number;
}

export interface StartQueryResponse {
  id: string;
  seed: number;
  sample_pct: number;
  confidence: number;
}

export interface ResultResponse {
  state: string;
  event: ProgressEvent | null;
  exact?: number | null;
  error?: ApiErrorBody;
}

export type SessionState = "idle" | "running" | "done" | "cancelled" | "failed";
