/**
 * Typed client for the decision service HTTP API.
 *
 * `fetch` is injectable so tests can run against a scripted transport,
 * and `putPolicy` refuses a band the server would refuse (the mirror
 * rule) before anything touches the network.
 */
import { isOverrideStatus, isPolicy, isRecommendation, isTelemetryRecord, } from "./types.js";
import { validatePolicyBand } from "./validate.js";
export class ApiError extends Error {
    constructor(status, message, field) {
        super(message);
        this.status = status;
        this.field = field;
    }
}
async function parseError(resp) {
    let message = `${resp.status}`;
    let field;
    try {
        const body = (await resp.json());
        if (body.error)
            message = body.error;
        field = body.field;
    }
    catch {
        /* non-JSON error body: keep the status text */
    }
    return new ApiError(resp.status, message, field);
}
export class ApiClient {
    constructor(base, fetchFn = (url, init) => fetch(url, init)) {
        this.base = base;
        this.fetchFn = fetchFn;
    }
    async getJson(path) {
        const resp = await this.fetchFn(this.base + path);
        if (!resp.ok)
            throw await parseError(resp);
        return resp.json();
    }
    async latest(node) {
        const body = await this.getJson(`/api/latest?node=${encodeURIComponent(node)}`);
        if (!isTelemetryRecord(body))
            throw new ApiError(0, "malformed telemetry record");
        return body;
    }
    async history(node, fromMs, toMs) {
        let path = `/api/history?node=${encodeURIComponent(node)}`;
        if (fromMs !== undefined)
            path += `&from=${fromMs}`;
        if (toMs !== undefined)
            path += `&to=${toMs}`;
        const body = await this.getJson(path);
        if (!Array.isArray(body) || !body.every(isTelemetryRecord)) {
            throw new ApiError(0, "malformed history payload");
        }
        return body;
    }
    async policy(crop) {
        const body = await this.getJson(`/api/policy/${encodeURIComponent(crop)}`);
        if (!isPolicy(body))
            throw new ApiError(0, "malformed policy payload");
        return body;
    }
    async putPolicy(crop, mOn, mOff) {
        const invalid = validatePolicyBand(mOn, mOff);
        if (invalid)
            throw new ApiError(0, invalid.message, invalid.field);
        const resp = await this.fetchFn(`${this.base}/api/policy/${encodeURIComponent(crop)}`, {
            method: "PUT",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ m_on_pct: mOn, m_off_pct: mOff }),
        });
        if (!resp.ok)
            throw await parseError(resp);
        const body = (await resp.json());
        if (!isPolicy(body))
            throw new ApiError(0, "malformed policy payload");
        return body;
    }
    async overrideStatus(node) {
        const body = await this.getJson(`/api/override?node=${encodeURIComponent(node)}`);
        if (!isOverrideStatus(body))
            throw new ApiError(0, "malformed override payload");
        return body;
    }
    async postOverride(node, state, ttlS) {
        const resp = await this.fetchFn(`${this.base}/api/override`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(state === "clear" ? { node, state } : { node, state, ttl_s: ttlS }),
        });
        if (!resp.ok)
            throw await parseError(resp);
        await resp.text();
    }
    async recommendation(crop, node) {
        let path = `/api/recommendation?crop=${encodeURIComponent(crop)}`;
        if (node)
            path += `&node=${encodeURIComponent(node)}`;
        const body = await this.getJson(path);
        if (!isRecommendation(body))
            throw new ApiError(0, "malformed recommendation payload");
        return body;
    }
    async model() {
        return (await this.getJson("/api/model"));
    }
}
