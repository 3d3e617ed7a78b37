/**
 * Console view model: pure transition functions over an immutable state.
 *
 * Two invariants the tests pin down:
 *  - no fabrication: the state stores server payloads verbatim, and the
 *    derived display only copies or formats them -- the pump state and its
 *    reason are always the service's words, never computed here;
 *  - no silent staleness: a failed poll flips a visible stale flag carrying
 *    the last-success time, and a superseded (out-of-order) response is
 *    discarded rather than applied.
 */
export function initialState() {
    return {
        latest: null,
        history: [],
        policy: null,
        recommendation: null,
        override: null,
        overrideFetchedAtMs: null,
        lastSuccessMs: null,
        stale: false,
        appliedSeq: 0,
    };
}
export function applyPoll(state, seq, payload, nowMs) {
    if (seq <= state.appliedSeq) {
        return state; // a newer response already landed; drop this one
    }
    return {
        ...state,
        latest: payload.latest,
        history: payload.history,
        override: payload.override,
        recommendation: payload.recommendation,
        overrideFetchedAtMs: nowMs,
        lastSuccessMs: nowMs,
        stale: false,
        appliedSeq: seq,
    };
}
export function applyPollFailure(state, seq) {
    if (seq <= state.appliedSeq) {
        return state;
    }
    return { ...state, stale: true, appliedSeq: seq };
}
export function applyPolicy(state, policy) {
    return { ...state, policy };
}
/** Seconds left on the active override, counted down locally from the
 * server-reported remainder; zero once expired or when none is pending. */
export function overrideRemainingS(state, nowMs) {
    if (!state.override || state.override.state === "none" || state.overrideFetchedAtMs === null) {
        return 0;
    }
    const elapsed = (nowMs - state.overrideFetchedAtMs) / 1000;
    return Math.max(0, state.override.ttl_remaining_s - elapsed);
}
function fmt(value, digits, unit) {
    return `${value.toFixed(digits)}${unit}`;
}
export function formatDuration(seconds) {
    if (seconds >= 2 * 3600)
        return `${(seconds / 3600).toFixed(1)} h`;
    if (seconds >= 120)
        return `${Math.round(seconds / 60)} min`;
    return `${Math.round(seconds)} s`;
}
/** Projection of the state for rendering; copies served values only. */
export function deriveDisplay(state, nowMs) {
    const rec = state.latest;
    const values = rec
        ? [
            { label: "temperature", text: fmt(rec.t_c, 1, " °C") },
            { label: "humidity", text: fmt(rec.rh_pct, 1, " %") },
            { label: "moisture", text: `${rec.m_pct} %` },
            { label: "rain", text: rec.rain ? "raining" : "dry" },
            { label: "pressure", text: fmt(rec.p_kpa, 2, " kPa") },
            { label: "flow", text: fmt(rec.f_mlmin, 2, " mL/min") },
            { label: "volume", text: fmt(rec.vol_ml, 2, " mL") },
        ]
        : [];
    const remaining = overrideRemainingS(state, nowMs);
    let badge = null;
    if (state.override && state.override.state !== "none" && remaining > 0) {
        badge = `forced ${state.override.state} · ${formatDuration(remaining)} left`;
    }
    let banner = null;
    if (state.stale) {
        banner = state.lastSuccessMs
            ? `stale data · last update ${new Date(state.lastSuccessMs).toISOString().slice(11, 19)} UTC`
            : "no data yet · service unreachable";
    }
    let etaText = null;
    if (state.recommendation) {
        etaText =
            state.recommendation.next_irrigation_eta_s === null
                ? "no depletion predicted"
                : `next irrigation in ${formatDuration(state.recommendation.next_irrigation_eta_s)}, run pump ${formatDuration(state.recommendation.suggested_duration_s)}`;
    }
    return {
        pumpOn: rec ? rec.pump === 1 : null,
        pumpReason: state.override ? state.override.reason : null,
        rain: rec ? rec.rain === 1 : null,
        values,
        overrideBadge: badge,
        staleBanner: banner,
        etaText,
    };
}
