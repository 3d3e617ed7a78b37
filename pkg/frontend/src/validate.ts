/**
 * Client-side policy validation, mirroring the server rule exactly:
 * thresholds are integer percents with m_on < m_off. Invalid input never
 * leaves the browser; the server re-checks anyway and answers 400.
 */

export interface PolicyBandError {
  field: "m_on_pct" | "m_off_pct";
  message: string;
}

export function validatePolicyBand(mOn: number, mOff: number): PolicyBandError | null {
  if (!Number.isInteger(mOn) || mOn < 0 || mOn > 100) {
    return { field: "m_on_pct", message: "on threshold must be an integer in 0..100" };
  }
  if (!Number.isInteger(mOff) || mOff < 0 || mOff > 100) {
    return { field: "m_off_pct", message: "off threshold must be an integer in 0..100" };
  }
  if (mOn >= mOff) {
    return { field: "m_on_pct", message: "on threshold must be below the off threshold" };
  }
  return null;
}
