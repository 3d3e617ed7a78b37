/**
 * Typed client for the decision service HTTP API.
 *
 * `fetch` is injectable so tests can run against a scripted transport,
 * and `putPolicy` refuses a band the server would refuse (the mirror
 * rule) before anything touches the network.
 */

import {
  isOverrideStatus,
  isPolicy,
  isRecommendation,
  isTelemetryRecord,
  ModelSnapshot,
  OverrideStatus,
  Policy,
  Recommendation,
  TelemetryRecord,
} from "./types.js";
import { validatePolicyBand } from "./validate.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
    public field?: string,
  ) {
    super(message);
  }
}

async function parseError(resp: Response): Promise<ApiError> {
  let message = `${resp.status}`;
  let field: string | undefined;
  try {
    const body = (await resp.json()) as { error?: string; field?: string };
    if (body.error) message = body.error;
    field = body.field;
  } catch {
    /* non-JSON error body: keep the status text */
  }
  return new ApiError(resp.status, message, field);
}

export class ApiClient {
  constructor(
    private base: string,
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async getJson(path: string): Promise<unknown> {
    const resp = await this.fetchFn(this.base + path);
    if (!resp.ok) throw await parseError(resp);
    return resp.json();
  }

  async latest(node: string): Promise<TelemetryRecord> {
    const body = await this.getJson(`/api/latest?node=${encodeURIComponent(node)}`);
    if (!isTelemetryRecord(body)) throw new ApiError(0, "malformed telemetry record");
    return body;
  }

  async history(node: string, fromMs?: number, toMs?: number): Promise<TelemetryRecord[]> {
    let path = `/api/history?node=${encodeURIComponent(node)}`;
    if (fromMs !== undefined) path += `&from=${fromMs}`;
    if (toMs !== undefined) path += `&to=${toMs}`;
    const body = await this.getJson(path);
    if (!Array.isArray(body) || !body.every(isTelemetryRecord)) {
      throw new ApiError(0, "malformed history payload");
    }
    return body;
  }

  async policy(crop: string): Promise<Policy> {
    const body = await this.getJson(`/api/policy/${encodeURIComponent(crop)}`);
    if (!isPolicy(body)) throw new ApiError(0, "malformed policy payload");
    return body;
  }

  async putPolicy(crop: string, mOn: number, mOff: number): Promise<Policy> {
    const invalid = validatePolicyBand(mOn, mOff);
    if (invalid) throw new ApiError(0, invalid.message, invalid.field);
    const resp = await this.fetchFn(`${this.base}/api/policy/${encodeURIComponent(crop)}`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ m_on_pct: mOn, m_off_pct: mOff }),
    });
    if (!resp.ok) throw await parseError(resp);
    const body = (await resp.json()) as unknown;
    if (!isPolicy(body)) throw new ApiError(0, "malformed policy payload");
    return body;
  }

  async overrideStatus(node: string): Promise<OverrideStatus> {
    const body = await this.getJson(`/api/override?node=${encodeURIComponent(node)}`);
    if (!isOverrideStatus(body)) throw new ApiError(0, "malformed override payload");
    return body;
  }

  async postOverride(node: string, state: "on" | "off" | "clear", ttlS?: number): Promise<void> {
    const resp = await this.fetchFn(`${this.base}/api/override`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(state === "clear" ? { node, state } : { node, state, ttl_s: ttlS }),
    });
    if (!resp.ok) throw await parseError(resp);
    await resp.text();
  }

  async recommendation(crop: string, node?: string): Promise<Recommendation> {
    let path = `/api/recommendation?crop=${encodeURIComponent(crop)}`;
    if (node) path += `&node=${encodeURIComponent(node)}`;
    const body = await this.getJson(path);
    if (!isRecommendation(body)) throw new ApiError(0, "malformed recommendation payload");
    return body;
  }

  async model(): Promise<ModelSnapshot> {
    return (await this.getJson("/api/model")) as ModelSnapshot;
  }
}
