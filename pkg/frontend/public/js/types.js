/**
 * Shapes served by the decision service API, plus runtime guards.
 *
 * The console never invents values: everything rendered is one of these
 * payloads (or a formatted copy of one), fetched from the service.
 */
function isObject(x) {
    return typeof x === "object" && x !== null && !Array.isArray(x);
}
function hasNumbers(obj, keys) {
    return keys.every((k) => typeof obj[k] === "number" && Number.isFinite(obj[k]));
}
export function isTelemetryRecord(x) {
    if (!isObject(x) || x.v !== 1 || typeof x.node !== "string")
        return false;
    if (!hasNumbers(x, ["ts_ms", "t_c", "rh_pct", "m_pct", "m_raw", "lux_raw", "p_kpa", "f_mlmin", "vol_ml"])) {
        return false;
    }
    return (x.rain === 0 || x.rain === 1) && (x.pump === 0 || x.pump === 1);
}
export function isPolicy(x) {
    return isObject(x) && typeof x.crop_id === "string" && hasNumbers(x, ["m_on_pct", "m_off_pct"]);
}
export function isRecommendation(x) {
    return (isObject(x) &&
        typeof x.crop_id === "string" &&
        hasNumbers(x, ["suggested_duration_s", "predicted_depletion_frac_per_hr"]) &&
        (x.next_irrigation_eta_s === null || typeof x.next_irrigation_eta_s === "number"));
}
export function isOverrideStatus(x) {
    return (isObject(x) &&
        typeof x.node === "string" &&
        (x.state === "on" || x.state === "off" || x.state === "none") &&
        typeof x.ttl_remaining_s === "number" &&
        typeof x.reason === "string");
}
