import { describe, expect, it } from "vitest";

import { ApiError, SoftaggClient, SseParser } from "../src/api.js";
import type { ProgressEvent, TerminalEvent } from "../src/types.js";

describe("SseParser", () => {
  it("parses events split across arbitrary chunk boundaries", () => {
    const parser = new SseParser();
    const wire = 'event: progress\nid: 1\ndata: {"batch": 1}\n\nevent: terminal\ndata: {"state": "done"}\n\n';
    const messages = [];
    for (let i = 0; i < wire.length; i += 7) {
      messages.push(...parser.feed(wire.slice(i, i + 7)));
    }
    expect(messages).toHaveLength(2);
    expect(messages[0]).toMatchObject({ event: "progress", id: "1", data: '{"batch": 1}' });
    expect(messages[1]).toMatchObject({ event: "terminal", data: '{"state": "done"}' });
  });

  it("ignores keepalive comments", () => {
    const parser = new SseParser();
    expect(parser.feed(": keepalive\n\n")).toHaveLength(0);
    expect(parser.feed("event: progress\ndata: {}\n\n")).toHaveLength(1);
  });

  it("joins multiple data lines", () => {
    const parser = new SseParser();
    const [msg] = parser.feed("data: a\ndata: b\n\n");
    expect(msg.data).toBe("a\nb");
  });

  it("handles CRLF line endings", () => {
    const parser = new SseParser();
    const [msg] = parser.feed("event: progress\r\ndata: {}\r\n\r\n");
    expect(msg.event).toBe("progress");
  });
});

function sseResponse(wire: string): Response {
  const stream = new ReadableStream<Uint8Array>({
    start(controller) {
      controller.enqueue(new TextEncoder().encode(wire));
      controller.close();
    },
  });
  return new Response(stream, {
    status: 200,
    headers: { "Content-Type": "text/event-stream" },
  });
}

describe("SoftaggClient", () => {
  it("dispatches progress and terminal events from the stream", async () => {
    const wire =
      'event: progress\ndata: {"batch":1,"n":10,"m":100,"estimate":5.0,"error_rate":1.0,' +
      '"confidence":0.95,"fraction":0.1,"done":false,"diagnosis":null}\n\n' +
      ': keepalive\n\n' +
      'event: terminal\ndata: {"state":"done"}\n\n';
    const client = new SoftaggClient("", async () => sseResponse(wire));
    const progress: ProgressEvent[] = [];
    const terminal = await new Promise<TerminalEvent>((resolve, reject) => {
      client.subscribe("q", {
        onProgress: (ev) => progress.push(ev),
        onTerminal: resolve,
        onError: reject,
      });
    });
    expect(progress).toHaveLength(1);
    expect(progress[0].batch).toBe(1);
    expect(progress[0].estimate).toBe(5.0);
    expect(terminal.state).toBe("done");
  });

  it("surfaces error payloads as ApiError", async () => {
    const body = { code: "validation_error", message: "query failed validation",
                   details: ["predicate #0: unknown label age-ancient"] };
    const client = new SoftaggClient("", async () =>
      new Response(JSON.stringify(body), { status: 422 }));
    const err = await client.startQuery("ds", { text: "bad" }).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(422);
    expect(err.body).toEqual(body);
  });

  it("posts cancel to the session endpoint", async () => {
    const calls: Array<{ url: string; method?: string }> = [];
    const client = new SoftaggClient("http://x", async (url, init) => {
      calls.push({ url, method: init?.method });
      return new Response(JSON.stringify({ state: "cancelled" }), { status: 200 });
    });
    const out = await client.cancelQuery("abc");
    expect(out.state).toBe("cancelled");
    expect(calls).toEqual([{ url: "http://x/queries/abc/cancel", method: "POST" }]);
  });

  it("builds query-session requests with the wire field names", async () => {
    let captured: unknown = null;
    const client = new SoftaggClient("", async (_url, init) => {
      captured = JSON.parse(String(init?.body));
      return new Response(JSON.stringify({ id: "q", seed: 7, sample_pct: 2, confidence: 0.9 }),
                          { status: 202 });
    });
    await client.startQuery("ds", { text: "SELECT...", confidence: 0.9, sample_pct: 2, seed: 7 });
    expect(captured).toEqual({ text: "SELECT...", confidence: 0.9, sample_pct: 2, seed: 7 });
  });
});
