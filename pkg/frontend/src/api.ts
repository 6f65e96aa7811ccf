/** Thin typed client over the documented REST endpoints — and nothing else.
 * The contract tests enumerate every (method, path, payload) this module can
 * emit, so any drift from the server contract fails the suite. */

import type {
  HealthResponse,
  MetricsResponse,
  NsRecord,
  SpectrumResponse,
  TaskRecord,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`${status}: ${detail}`);
  }
}

export class ApiClient {
  constructor(
    private base: string,
    private token: string = "",
    private fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const resp = await this.fetchImpl(this.base + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await resp.text();
    const payload = text ? JSON.parse(text) : {};
    if (!resp.ok) {
      const detail =
        typeof payload === "object" && payload !== null
          ? ((payload.error ?? payload.detail ?? text) as string)
          : text;
      throw new ApiError(resp.status, String(detail));
    }
    return payload as T;
  }

  health(): Promise<HealthResponse> {
    return this.request("GET", "/healthz");
  }

  listNs(): Promise<NsRecord[]> {
    return this.request("GET", "/ns");
  }

  getNs(nsId: string): Promise<NsRecord> {
    return this.request("GET", `/ns/${encodeURIComponent(nsId)}`);
  }

  deployNs(nsdRef: string, nsId?: string): Promise<{ ns_id: string; state: string }> {
    const body: Record<string, string> = { nsd: nsdRef };
    if (nsId) body["ns_id"] = nsId;
    return this.request("POST", "/ns", body);
  }

  reconfigureNs(nsId: string, target: string): Promise<{ ns_id: string; state: string }> {
    return this.request("POST", `/ns/${encodeURIComponent(nsId)}/reconfigure`, { target });
  }

  terminateNs(nsId: string): Promise<{ ns_id: string; state: string }> {
    return this.request("DELETE", `/ns/${encodeURIComponent(nsId)}`);
  }

  listNsds(): Promise<{ name: string; version: string }[]> {
    return this.request("GET", "/nsds");
  }

  spectrum(): Promise<SpectrumResponse> {
    return this.request("GET", "/spectrum");
  }

  tasks(nsId?: string): Promise<TaskRecord[]> {
    const query = nsId ? `?ns_id=${encodeURIComponent(nsId)}` : "";
    return this.request("GET", `/tasks${query}`);
  }

  metricsQuery(
    scope: string,
    scopeId: string,
    metric: string,
    t0?: number,
    t1?: number,
  ): Promise<MetricsResponse> {
    const params = new URLSearchParams({ scope, scope_id: scopeId, metric });
    if (t0 !== undefined) params.set("t0", String(t0));
    if (t1 !== undefined) params.set("t1", String(t1));
    return this.request("GET", `/metrics/query?${params.toString()}`);
  }

  /** Slide the offered load: post a fresh load profile that holds the given
   * demand from `now` for `horizonS` simulated seconds. */
  setLoad(demandRbs: number, now: number, horizonS = 3600): Promise<{ loaded: boolean }> {
    return this.request("POST", "/sim/scenario", {
      duration_s: now + horizonS,
      load_segments: [{ t_start: now, t_end: now + horizonS, demand_rbs: demandRbs }],
    });
  }
}
