/** Dashboard state: a pure, DOM-free reduction of server data.
 *
 * Everything here is derived from REST responses and event records; replaying
 * the same events is a no-op (seq-deduplicated), so reconnect replays are
 * safe. Chart buffers hold exactly what /metrics/query returned — no
 * client-side smoothing or resampling.
 */

import type { EventRecord, NsRecord, NsState, Sample } from "./types.js";

export interface NsRow {
  nsId: string;
  nsdRef: string;
  state: NsState;
  capacityRbs: number;
  errorReason: string;
}

export interface FeedItem {
  t: number;
  text: string;
}

export interface ActionSet {
  reconfigure: boolean;
  terminate: boolean;
}

const FEED_LIMIT = 200;

export function allowedActions(state: NsState): ActionSet {
  return {
    reconfigure: state === "Running",
    terminate: state === "Running" || state === "Error" || state === "Deploying",
  };
}

export class Dashboard {
  rows = new Map<string, NsRow>();
  series = new Map<string, Sample[]>();
  alarmFeed: FeedItem[] = [];
  taskFeed: FeedItem[] = [];
  stateHistory = new Map<string, NsState[]>();
  connected = false;
  lastSeq = -1;

  /** Full-refresh the table from GET /ns (events keep it live in between). */
  applyNsList(list: NsRecord[]): void {
    const seen = new Set<string>();
    for (const record of list) {
      seen.add(record.ns_id);
      const row = this.rows.get(record.ns_id) ?? {
        nsId: record.ns_id,
        nsdRef: record.nsd_ref,
        state: record.state,
        capacityRbs: 0,
        errorReason: record.error_reason,
      };
      row.nsdRef = record.nsd_ref;
      row.state = record.state;
      row.errorReason = record.error_reason;
      this.rows.set(record.ns_id, row);
      this.recordState(record.ns_id, record.state);
    }
    for (const nsId of [...this.rows.keys()]) {
      if (!seen.has(nsId)) this.rows.delete(nsId);
    }
  }

  /** Apply one event record; returns false for duplicates (replay). */
  applyEvent(event: EventRecord): boolean {
    if (event.seq <= this.lastSeq) return false;
    this.lastSeq = event.seq;
    switch (event.kind) {
      case "ns_state": {
        const nsId = event["ns_id"] as string;
        const to = event["to"] as NsState;
        const row = this.rows.get(nsId);
        if (row) {
          row.state = to;
          if (to === "Error") row.errorReason = String(event["reason"] ?? "");
        } else {
          this.rows.set(nsId, {
            nsId,
            nsdRef: "",
            state: to,
            capacityRbs: 0,
            errorReason: "",
          });
        }
        this.recordState(nsId, to);
        break;
      }
      case "alarm_state":
        this.pushFeed(
          this.alarmFeed,
          event.t,
          `${event["rule_id"]} ${event["from"]} -> ${event["to"]} (value ${event["value"]})`,
        );
        break;
      case "decision":
        this.pushFeed(
          this.alarmFeed,
          event.t,
          `${event["rule_id"]}: ${event["decision"]}` +
            (event["action"] ? ` ${event["action"]}` : "") +
            (event["reason"] ? ` (${event["reason"]})` : ""),
        );
        break;
      case "task_state":
        this.pushFeed(
          this.taskFeed,
          event.t,
          `${event["ns_id"]} ${event["command"]} ${event["state"]}`,
        );
        break;
      case "downtime":
        this.pushFeed(
          this.alarmFeed,
          event.t,
          `downtime ${event["ns_id"]}: ${event["length_s"]}s`,
        );
        break;
      default:
        break; // carrier/vnf events show up via table refresh and charts
    }
    return true;
  }

  /** Merge a /metrics/query result into a series buffer, deduplicated by t. */
  mergeSamples(path: string, samples: Sample[]): void {
    const existing = this.series.get(path) ?? [];
    const lastT = existing.length ? existing[existing.length - 1][0] : -Infinity;
    for (const sample of samples) {
      if (sample[0] > lastT) existing.push(sample);
    }
    this.series.set(path, existing);
    const match = path.match(/^ns\/(.+)\/rb_capacity$/);
    if (match && existing.length) {
      const row = this.rows.get(match[1]);
      if (row) row.capacityRbs = existing[existing.length - 1][1];
    }
  }

  samples(path: string): Sample[] {
    return this.series.get(path) ?? [];
  }

  /** Latest timestamp of a series, for incremental t0= queries. */
  lastSampleT(path: string): number {
    const samples = this.series.get(path);
    return samples && samples.length ? samples[samples.length - 1][0] : 0;
  }

  nsIds(): string[] {
    return [...this.rows.keys()].sort();
  }

  private recordState(nsId: string, state: NsState): void {
    const history = this.stateHistory.get(nsId) ?? [];
    if (history[history.length - 1] !== state) history.push(state);
    this.stateHistory.set(nsId, history);
  }

  private pushFeed(feed: FeedItem[], t: number, text: string): void {
    feed.push({ t, text });
    if (feed.length > FEED_LIMIT) feed.splice(0, feed.length - FEED_LIMIT);
  }
}

/** Collapse consecutive duplicates; the shape tests and the RB chart legend
 * both want the step sequence, not every tick. */
export function collapseSteps(samples: Sample[]): number[] {
  const out: number[] = [];
  for (const [, value] of samples) {
    if (out.length === 0 || out[out.length - 1] !== value) out.push(value);
  }
  return out;
}
