/** NDJSON event-stream consumer with reconnect.
 * Blank lines are server keepalives; everything else is one event record. */
/** Reassembles complete lines from arbitrary chunk boundaries. */
export class LineSplitter {
    constructor() {
        this.buffer = "";
    }
    feed(chunk) {
        this.buffer += chunk;
        const parts = this.buffer.split("\n");
        this.buffer = parts.pop() ?? "";
        return parts.filter((line) => line.trim().length > 0);
    }
    flush() {
        const rest = this.buffer.trim();
        this.buffer = "";
        return rest ? [rest] : [];
    }
}
export class EventStream {
    constructor(url, callbacks, fetchImpl = (...args) => fetch(...args), retryMs = 2000) {
        this.url = url;
        this.callbacks = callbacks;
        this.fetchImpl = fetchImpl;
        this.retryMs = retryMs;
        this.stopped = false;
    }
    stop() {
        this.stopped = true;
    }
    /** Runs until stop(); flags onStatus(false) whenever the connection drops
     * and retries after a pause. */
    async run() {
        while (!this.stopped) {
            try {
                const resp = await this.fetchImpl(this.url);
                if (!resp.ok || !resp.body)
                    throw new Error(`stream HTTP ${resp.status}`);
                this.callbacks.onStatus(true);
                await this.consume(resp.body);
            }
            catch {
                // fall through to reconnect
            }
            this.callbacks.onStatus(false);
            if (!this.stopped)
                await new Promise((r) => setTimeout(r, this.retryMs));
        }
    }
    async consume(body) {
        const reader = body.getReader();
        const decoder = new TextDecoder();
        const splitter = new LineSplitter();
        for (;;) {
            const { value, done } = await reader.read();
            if (done)
                break;
            for (const line of splitter.feed(decoder.decode(value, { stream: true }))) {
                this.dispatch(line);
            }
            if (this.stopped) {
                await reader.cancel();
                return;
            }
        }
        for (const line of splitter.flush())
            this.dispatch(line);
    }
    dispatch(line) {
        let event;
        try {
            event = JSON.parse(line);
        }
        catch {
            return; // tolerate torn lines on reconnect
        }
        this.callbacks.onEvent(event);
    }
}
