/** Thin typed client over the documented REST endpoints — and nothing else.
 * The contract tests enumerate every (method, path, payload) this module can
 * emit, so any drift from the server contract fails the suite. */
export class ApiError extends Error {
    constructor(status, detail) {
        super(`${status}: ${detail}`);
        this.status = status;
        this.detail = detail;
    }
}
export class ApiClient {
    constructor(base, token = "", fetchImpl = (...args) => fetch(...args)) {
        this.base = base;
        this.token = token;
        this.fetchImpl = fetchImpl;
    }
    async request(method, path, body) {
        const headers = {};
        if (body !== undefined)
            headers["Content-Type"] = "application/json";
        if (this.token)
            headers["Authorization"] = `Bearer ${this.token}`;
        const resp = await this.fetchImpl(this.base + path, {
            method,
            headers,
            body: body === undefined ? undefined : JSON.stringify(body),
        });
        const text = await resp.text();
        const payload = text ? JSON.parse(text) : {};
        if (!resp.ok) {
            const detail = typeof payload === "object" && payload !== null
                ? (payload.error ?? payload.detail ?? text)
                : text;
            throw new ApiError(resp.status, String(detail));
        }
        return payload;
    }
    health() {
        return this.request("GET", "/healthz");
    }
    listNs() {
        return this.request("GET", "/ns");
    }
    getNs(nsId) {
        return this.request("GET", `/ns/${encodeURIComponent(nsId)}`);
    }
    deployNs(nsdRef, nsId) {
        const body = { nsd: nsdRef };
        if (nsId)
            body["ns_id"] = nsId;
        return this.request("POST", "/ns", body);
    }
    reconfigureNs(nsId, target) {
        return this.request("POST", `/ns/${encodeURIComponent(nsId)}/reconfigure`, { target });
    }
    terminateNs(nsId) {
        return this.request("DELETE", `/ns/${encodeURIComponent(nsId)}`);
    }
    listNsds() {
        return this.request("GET", "/nsds");
    }
    spectrum() {
        return this.request("GET", "/spectrum");
    }
    tasks(nsId) {
        const query = nsId ? `?ns_id=${encodeURIComponent(nsId)}` : "";
        return this.request("GET", `/tasks${query}`);
    }
    metricsQuery(scope, scopeId, metric, t0, t1) {
        const params = new URLSearchParams({ scope, scope_id: scopeId, metric });
        if (t0 !== undefined)
            params.set("t0", String(t0));
        if (t1 !== undefined)
            params.set("t1", String(t1));
        return this.request("GET", `/metrics/query?${params.toString()}`);
    }
    /** Slide the offered load: post a fresh load profile that holds the given
     * demand from `now` for `horizonS` simulated seconds. */
    setLoad(demandRbs, now, horizonS = 3600) {
        return this.request("POST", "/sim/scenario", {
            duration_s: now + horizonS,
            load_segments: [{ t_start: now, t_end: now + horizonS, demand_rbs: demandRbs }],
        });
    }
}
