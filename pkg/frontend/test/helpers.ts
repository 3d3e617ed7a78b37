import { TelemetryRecord, OverrideStatus } from "../src/types.js";

export function record(over: Partial<TelemetryRecord> = {}): TelemetryRecord {
  return {
    v: 1,
    node: "edge-1",
    ts_ms: 1000,
    t_c: 25.0,
    rh_pct: 65.0,
    m_pct: 45,
    m_raw: 563,
    rain: 0,
    lux_raw: 812,
    p_kpa: 22.1,
    f_mlmin: 0.0,
    vol_ml: 0.0,
    pump: 0,
    ...over,
  };
}

export function overrideStatus(over: Partial<OverrideStatus> = {}): OverrideStatus {
  return { node: "edge-1", state: "none", ttl_remaining_s: 0, reason: "AUTO", ...over };
}

/** Minimal scripted fetch: maps "METHOD path-prefix" to a canned response. */
export function fakeFetch(routes: Record<string, { status?: number; body: unknown }>) {
  const calls: { url: string; init?: RequestInit }[] = [];
  const fn = async (url: string, init?: RequestInit): Promise<Response> => {
    calls.push({ url, init });
    const method = init?.method ?? "GET";
    for (const [key, spec] of Object.entries(routes)) {
      const [routeMethod, prefix] = key.split(" ", 2);
      if (method === routeMethod && url.startsWith(prefix)) {
        return new Response(JSON.stringify(spec.body), { status: spec.status ?? 200 });
      }
    }
    return new Response(JSON.stringify({ error: `no route for ${method} ${url}` }), { status: 404 });
  };
  return { fn, calls };
}
