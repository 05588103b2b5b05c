import type { RunEvent, RunStatus } from "./types.js";

/** One parsed server-sent event frame. */
export interface SseFrame {
  id?: number;
  event?: string;
  data: string;
}

/** Incremental parser for the server-sent event wire format.  Feed it
 *  chunks as they arrive; it emits complete frames (blank-line
 *  terminated) and buffers partial ones. */
export class SseParser {
  private buffer = "";

  push(chunk: string): SseFrame[] {
    this.buffer += chunk;
    const frames: SseFrame[] = [];
    let index: number;
    while ((index = this.buffer.indexOf("\n\n")) >= 0) {
      const raw = this.buffer.slice(0, index);
      this.buffer = this.buffer.slice(index + 2);
      const frame: SseFrame = { data: "" };
      const dataLines: string[] = [];
      for (const line of raw.split("\n")) {
        if (line.startsWith("id: ")) frame.id = Number(line.slice(4));
        else if (line.startsWith("event: ")) frame.event = line.slice(7);
        else if (line.startsWith("data: ")) dataLines.push(line.slice(6));
      }
      frame.data = dataLines.join("\n");
      if (frame.data.length > 0 || frame.event) frames.push(frame);
    }
    return frames;
  }
}

export function decodeEvent(frame: SseFrame): RunEvent | null {
  let payload: Record<string, unknown>;
  try {
    payload = JSON.parse(frame.data) as Record<string, unknown>;
  } catch {
    return null;
  }
  const eventId = frame.id ?? (payload.event_id as number);
  switch (frame.event) {
    case "pending":
      return {
        kind: "pending",
        event_id: eventId,
        pending: {
          pending_id: payload.pending_id as string,
          issued_at: payload.issued_at as number,
          configuration: payload.configuration as never,
        },
      };
    case "record":
      return {
        kind: "record",
        event_id: eventId,
        record_id: payload.record_id as number,
        round: payload.round as number,
        position: payload.position as number,
        source: payload.source as string,
        fitness: payload.fitness as number,
        best_fitness: payload.best_fitness as number,
        oracle_calls: payload.oracle_calls as number,
      };
    case "status":
      return {
        kind: "status",
        event_id: eventId,
        status: payload.status as RunStatus,
        error: payload.error as string | undefined,
      };
    default:
      return null;
  }
}

export interface StreamHandlers {
  onEvent(event: RunEvent): void;
  /** Called when the connection drops and a retry is scheduled. */
  onDisconnect?(): void;
  /** Called when a connection (or reconnection) is established. */
  onConnect?(): void;
  onEnd?(): void;
}

export interface StreamOptions {
  fetchImpl?: typeof fetch;
  retryDelayMs?: number;
  /** Stop retrying after this many consecutive failures (default: keep trying). */
  maxRetries?: number;
}

/** Subscribe to a run's event stream over fetch streaming, resuming
 *  after connection loss from the last event id seen.  Returns a
 *  function that cancels the subscription. */
export function subscribeEvents(
  base: string,
  runId: string,
  handlers: StreamHandlers,
  options: StreamOptions = {},
): () => void {
  const fetchImpl = options.fetchImpl ?? fetch;
  const retryDelay = options.retryDelayMs ?? 1000;
  let lastEventId = 0;
  let cancelled = false;
  let failures = 0;
  let timer: ReturnType<typeof setTimeout> | undefined;

  const url = () =>
    `${base.replace(/\/$/, "")}/api/v1/runs/${runId}/events` +
    (lastEventId > 0 ? `?last_event_id=${lastEventId}` : "");

  async function connect(): Promise<void> {
    const parser = new SseParser();
    try {
      const res = await fetchImpl(url(), {
        headers: lastEventId > 0 ? { "Last-Event-ID": String(lastEventId) } : {},
      });
      if (!res.ok || !res.body) throw new Error(`stream responded ${res.status}`);
      handlers.onConnect?.();
      failures = 0;
      const reader = res.body.getReader();
      const decoder = new TextDecoder();
      for (;;) {
        const { done, value } = await reader.read();
        if (cancelled) {
          void reader.cancel();
          return;
        }
        if (done) break;
        for (const frame of parser.push(decoder.decode(value, { stream: true }))) {
          if (frame.id !== undefined) lastEventId = Math.max(lastEventId, frame.id);
          const event = decodeEvent(frame);
          if (event) handlers.onEvent(event);
        }
      }
      // clean end of stream: the run is over
      handlers.onEnd?.();
    } catch {
      if (cancelled) return;
      failures += 1;
      if (options.maxRetries !== undefined && failures > options.maxRetries) {
        handlers.onEnd?.();
        return;
      }
      handlers.onDisconnect?.();
      timer = setTimeout(() => void connect(), retryDelay);
    }
  }

  void connect();
  return () => {
    cancelled = true;
    if (timer) clearTimeout(timer);
  };
}
