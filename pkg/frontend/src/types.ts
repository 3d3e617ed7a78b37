/**
 * Shapes served by the decision service API, plus runtime guards.
 *
 * The console never invents values: everything rendered is one of these
 * payloads (or a formatted copy of one), fetched from the service.
 */

export interface TelemetryRecord {
  v: number;
  node: string;
  ts_ms: number;
  t_c: number;
  rh_pct: number;
  m_pct: number;
  m_raw: number;
  rain: 0 | 1;
  lux_raw: number;
  p_kpa: number;
  f_mlmin: number;
  vol_ml: number;
  pump: 0 | 1;
}

export interface Policy {
  crop_id: string;
  m_on_pct: number;
  m_off_pct: number;
  min_on_s: number;
  dht_period_s: number;
  tick_s: number;
}

export interface Recommendation {
  crop_id: string;
  next_irrigation_eta_s: number | null;
  suggested_duration_s: number;
  predicted_depletion_frac_per_hr: number;
}

export type OverrideStateName = "on" | "off" | "none";

export interface OverrideStatus {
  node: string;
  state: OverrideStateName;
  ttl_remaining_s: number;
  /** Effective pump reason as the service reports it (RAIN_GATE, OVERRIDE, AUTO). */
  reason: string;
}

export interface ModelSnapshot {
  w: number[];
  n_samples: number;
}

function isObject(x: unknown): x is Record<string, unknown> {
  return typeof x === "object" && x !== null && !Array.isArray(x);
}

function hasNumbers(obj: Record<string, unknown>, keys: string[]): boolean {
  return keys.every((k) => typeof obj[k] === "number" && Number.isFinite(obj[k] as number));
}

export function isTelemetryRecord(x: unknown): x is TelemetryRecord {
  if (!isObject(x) || x.v !== 1 || typeof x.node !== "string") return false;
  if (!hasNumbers(x, ["ts_ms", "t_c", "rh_pct", "m_pct", "m_raw", "lux_raw", "p_kpa", "f_mlmin", "vol_ml"])) {
    return false;
  }
  return (x.rain === 0 || x.rain === 1) && (x.pump === 0 || x.pump === 1);
}

export function isPolicy(x: unknown): x is Policy {
  return isObject(x) && typeof x.crop_id === "string" && hasNumbers(x, ["m_on_pct", "m_off_pct"]);
}

export function isRecommendation(x: unknown): x is Recommendation {
  return (
    isObject(x) &&
    typeof x.crop_id === "string" &&
    hasNumbers(x, ["suggested_duration_s", "predicted_depletion_frac_per_hr"]) &&
    (x.next_irrigation_eta_s === null || typeof x.next_irrigation_eta_s === "number")
  );
}

export function isOverrideStatus(x: unknown): x is OverrideStatus {
  return (
    isObject(x) &&
    typeof x.node === "string" &&
    (x.state === "on" || x.state === "off" || x.state === "none") &&
    typeof x.ttl_remaining_s === "number" &&
    typeof x.reason === "string"
  );
}
