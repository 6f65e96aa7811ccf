/** NDJSON event-stream consumer with reconnect.
 * Blank lines are server keepalives; everything else is one event record. */

import type { FetchLike } from "./api.js";
import type { EventRecord } from "./types.js";

/** Reassembles complete lines from arbitrary chunk boundaries. */
export class LineSplitter {
  private buffer = "";

  feed(chunk: string): string[] {
    this.buffer += chunk;
    const parts = this.buffer.split("\n");
    this.buffer = parts.pop() ?? "";
    return parts.filter((line) => line.trim().length > 0);
  }

  flush(): string[] {
    const rest = this.buffer.trim();
    this.buffer = "";
    return rest ? [rest] : [];
  }
}

export interface StreamCallbacks {
  onEvent: (event: EventRecord) => void;
  onStatus: (connected: boolean) => void;
}

export class EventStream {
  private stopped = false;

  constructor(
    private url: string,
    private callbacks: StreamCallbacks,
    private fetchImpl: FetchLike = (...args) => fetch(...args),
    private retryMs = 2000,
  ) {}

  stop(): void {
    this.stopped = true;
  }

  /** Runs until stop(); flags onStatus(false) whenever the connection drops
   * and retries after a pause. */
  async run(): Promise<void> {
    while (!this.stopped) {
      try {
        const resp = await this.fetchImpl(this.url);
        if (!resp.ok || !resp.body) throw new Error(`stream HTTP ${resp.status}`);
        this.callbacks.onStatus(true);
        await this.consume(resp.body);
      } catch {
        // fall through to reconnect
      }
      this.callbacks.onStatus(false);
      if (!this.stopped) await new Promise((r) => setTimeout(r, this.retryMs));
    }
  }

  private async consume(body: ReadableStream<Uint8Array>): Promise<void> {
    const reader = body.getReader();
    const decoder = new TextDecoder();
    const splitter = new LineSplitter();
    for (;;) {
      const { value, done } = await reader.read();
      if (done) break;
      for (const line of splitter.feed(decoder.decode(value, { stream: true }))) {
        this.dispatch(line);
      }
      if (this.stopped) {
        await reader.cancel();
        return;
      }
    }
    for (const line of splitter.flush()) this.dispatch(line);
  }

  private dispatch(line: string): void {
    let event: EventRecord;
    try {
      event = JSON.parse(line) as EventRecord;
    } catch {
      return; // tolerate torn lines on reconnect
    }
    this.callbacks.onEvent(event);
  }
}
