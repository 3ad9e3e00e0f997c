// HTTP client for the query service, including the server-sent event
// subscription.  The stream is read via fetch so the same code path runs
// in the browser and under tests with an injected fetch implementation.

import type {
  ApiErrorBody,
  KbSummary,
  ProgressEvent,
  ResultResponse,
  StartQueryRequest,
  StartQueryResponse,
  TerminalEvent,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiErrorBody | null,
  ) {
    super(body?.message ?? `request failed with status ${status}`);
  }
}

export interface SseMessage {
  event: string;
  data: string;
  id?: string;
}

/** Incremental text/event-stream parser; feed() returns completed messages. */
export class SseParser {
  private buffer = "";

  feed(chunk: string): SseMessage[] {
    this.buffer += chunk.replace(/\r\n/g, "\n");
    const messages: SseMessage[] = [];
    let split: number;
    while ((split = this.buffer.indexOf("\n\n")) !== -1) {
      const raw = this.buffer.slice(0, split);
      this.buffer = this.buffer.slice(split + 2);
      const msg: SseMessage = { event: "message", data: "" };
      const data: string[] = [];
      for (const line of raw.split("\n")) {
        if (line.startsWith(":")) continue; // comment / keepalive
        const colon = line.indexOf(":");
        if (colon === -1) continue;
        const field = line.slice(0, colon);
        const value = line.slice(colon + 1).replace(/^ /, "");
        if (field === "event") msg.event = value;
        else if (field === "data") data.push(value);
        else if (field === "id") msg.id = value;
      }
      msg.data = data.join("\n");
      if (msg.data.length || msg.event !== "message") messages.push(msg);
    }
    return messages;
  }
}

export interface EventStreamHandlers {
  onProgress: (ev: ProgressEvent) => void;
  onTerminal: (terminal: TerminalEvent) => void;
  onError?: (err: unknown) => void;
}

export interface EventSubscription {
  close(): void;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class SoftaggClient {
  constructor(
    private baseUrl = "",
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    if (!resp.ok) {
      let body: ApiErrorBody | null = null;
      try {
        body = (await resp.json()) as ApiErrorBody;
      } catch {
        body = null;
      }
      throw new ApiError(resp.status, body);
    }
    return (await resp.json()) as T;
  }

  createDataset(csv: string, table: string): Promise<{ id: string }> {
    const params = new URLSearchParams({ table });
    return this.request(`/datasets?${params}`, {
      method: "POST",
      body: csv,
      headers: { "Content-Type": "text/csv" },
    });
  }

  uploadLabels(datasetId: string, catalog: string): Promise<{ labels: string[] }> {
    return this.request(`/datasets/${datasetId}/labels`, { method: "POST", body: catalog });
  }

  buildKb(datasetId: string, threshold: number): Promise<KbSummary> {
    return this.request(`/datasets/${datasetId}/kb`, {
      method: "POST",
      body: JSON.stringify({ threshold }),
      headers: { "Content-Type": "application/json" },
    });
  }

  kbSummary(datasetId: string): Promise<KbSummary> {
    return this.request(`/datasets/${datasetId}/kb`);
  }

  startQuery(datasetId: string, req: StartQueryRequest): Promise<StartQueryResponse> {
    return this.request(`/datasets/${datasetId}/queries`, {
      method: "POST",
      body: JSON.stringify(req),
      headers: { "Content-Type": "application/json" },
    });
  }

  cancelQuery(queryId: string): Promise<{ state: string }> {
    return this.request(`/queries/${queryId}/cancel`, { method: "POST" });
  }

  result(queryId: string, exact = false): Promise<ResultResponse> {
    const suffix = exact ? "?exact=true" : "";
    return this.request(`/queries/${queryId}/result${suffix}`);
  }

  /** Open the session's event stream; returns a handle that closes it. */
  subscribe(queryId: string, handlers: EventStreamHandlers): EventSubscription {
    const controller = new AbortController();
    void (async () => {
      try {
        const resp = await this.fetchImpl(`${this.baseUrl}/queries/${queryId}/events`, {
          signal: controller.signal,
          headers: { Accept: "text/event-stream" },
        });
        if (!resp.ok || !resp.body) {
          let body: ApiErrorBody | null = null;
          try {
            body = (await resp.json()) as ApiErrorBody;
          } catch {
            body = null;
          }
          throw new ApiError(resp.status, body);
        }
        const reader = resp.body.getReader();
        const decoder = new TextDecoder();
        const parser = new SseParser();
        for (;;) {
          const { done, value } = await reader.read();
          const chunk = value ? decoder.decode(value, { stream: true }) : "";
          for (const msg of parser.feed(chunk)) {
            if (msg.event === "progress") {
              handlers.onProgress(JSON.parse(msg.data) as ProgressEvent);
            } else if (msg.event === "terminal") {
              handlers.onTerminal(JSON.parse(msg.data) as TerminalEvent);
              controller.abort();
              return;
            }
          }
          if (done) return;
        }
      } catch (err) {
        if (!controller.signal.aborted) handlers.onError?.(err);
      }
    })();
    return { close: () => controller.abort() };
  }
}
