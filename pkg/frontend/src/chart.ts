/**
 * Moisture history as an SVG polyline: one point per record, in the
 * timestamp order the service returned (never re-sorted or resampled).
 */

import { TelemetryRecord } from "./types.js";

export interface ChartGeometry {
  width: number;
  height: number;
  pad: number;
}

export const DEFAULT_GEOMETRY: ChartGeometry = { width: 640, height: 160, pad: 8 };

export function moisturePoints(
  records: TelemetryRecord[],
  geo: ChartGeometry = DEFAULT_GEOMETRY,
): string {
  if (records.length === 0) return "";
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
export function thresholdY(pct: number, geo: ChartGeometry = DEFAULT_GEOMETRY): number {
  return geo.pad + (1 - pct / 100) * (geo.height - 2 * geo.pad);
}
