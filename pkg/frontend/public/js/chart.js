/**
 * Moisture history as an SVG polyline: one point per record, in the
 * timestamp order the service returned (never re-sorted or resampled).
 */
export const DEFAULT_GEOMETRY = { width: 640, height: 160, pad: 8 };
export function moisturePoints(records, geo = DEFAULT_GEOMETRY) {
    if (records.length === 0)
        return "";
    const t0 = records[0].ts_ms;
    const t1 = records[records.length - 1].ts_ms;
    const span = Math.max(1, t1 - t0);
    const innerW = geo.width - 2 * geo.pad;
    const innerH = geo.height - 2 * geo.pad;
    return records
        .map((rec) => {
        const x = geo.pad + ((rec.ts_ms - t0) / span) * innerW;
        const y = geo.pad + (1 - rec.m_pct / 100) * innerH;
        return `${x.toFixed(1)},${y.toFixed(1)}`;
    })
        .join(" ");
}
/** Threshold guide line y-coordinate for a given moisture percent. */
export function thresholdY(pct, geo = DEFAULT_GEOMETRY) {
    return geo.pad + (1 - pct / 100) * (geo.height - 2 * geo.pad);
}
