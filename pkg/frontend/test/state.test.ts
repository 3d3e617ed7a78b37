import { describe, expect, it } from "vitest";

import {
  applyPoll,
  applyPollFailure,
  deriveDisplay,
  formatDuration,
  initialState,
  overrideRemainingS,
} from "../src/state.js";
import { overrideStatus, record } from "./helpers.js";

const NOW = 1_700_000_000_000;

function polled(over: Partial<Parameters<typeof applyPoll>[2]> = {}) {
  return applyPoll(
    initialState(),
    1,
    {
      latest: record(),
      history: [record()],
      override: overrideStatus(),
      recommendation: null,
      ...over,
    },
    NOW,
  );
}

describe("poll transitions", () => {
  it("stores the served payloads verbatim", () => {
    const latest = record({ pump: 1, m_pct: 38 });
    const state = polled({ latest });
    expect(state.latest).toBe(latest); // same object, nothing recomputed
    expect(state.stale).toBe(false);
    expect(state.lastSuccessMs).toBe(NOW);
  });

  it("failure flips the stale flag but keeps the last good data", () => {
    const good = polled();
    const state = applyPollFailure(good, 2);
    expect(state.stale).toBe(true);
    expect(state.latest).toEqual(good.latest);
    expect(state.lastSuccessMs).toBe(NOW);
  });

  it("a superseded response is discarded", () => {
    const newer = polled({ latest: record({ m_pct: 50 }) });
    const lateOld = applyPoll(
      newer,
      1, // older than the applied seq
      { latest: record({ m_pct: 10 }), history: [], override: overrideStatus(), recommendation: null },
      NOW + 500,
    );
    expect(lateOld).toBe(newer);
  });

  it("recovery clears the banner", () => {
    let state = applyPollFailure(polled(), 2);
    state = applyPoll(
      state,
      3,
      { latest: record(), history: [], override: overrideStatus(), recommendation: null },
      NOW + 4000,
    );
    expect(state.stale).toBe(false);
  });
});

describe("display projection", () => {
  it("pump state and reason are the service's words", () => {
    const state = polled({
      latest: record({ pump: 0, rain: 1 }),
      override: overrideStatus({ state: "on", ttl_remaining_s: 300, reason: "RAIN_GATE" }),
    });
    const display = deriveDisplay(state, NOW);
    expect(display.pumpOn).toBe(false);
    expect(display.pumpReason).toBe("RAIN_GATE");
  });

  it("follows whatever reason the service reports, even a surprising one", () => {
    // proves the reason is never derived locally from rain/pump values
    const state = polled({
      latest: record({ pump: 0, rain: 1 }),
      override: overrideStatus({ reason: "MAINTENANCE" }),
    });
    expect(deriveDisplay(state, NOW).pumpReason).toBe("MAINTENANCE");
  });

  it("stale banner carries the last-success time", () => {
    const state = applyPollFailure(polled(), 2);
    const display = deriveDisplay(state, NOW + 10_000);
    expect(display.staleBanner).toContain("stale data");
    expect(display.staleBanner).toContain("UTC");
  });

  it("empty state renders an empty view, not a crash", () => {
    const display = deriveDisplay(initialState(), NOW);
    expect(display.pumpOn).toBeNull();
    expect(display.values).toEqual([]);
    expect(display.overrideBadge).toBeNull();
  });

  it("eta text distinguishes no-depletion from a forecast", () => {
    const none = polled({
      recommendation: {
        crop_id: "tomato",
        next_irrigation_eta_s: null,
        suggested_duration_s: 444,
        predicted_depletion_frac_per_hr: 0,
      },
    });
    expect(deriveDisplay(none, NOW).etaText).toBe("no depletion predicted");
    const soon = polled({
      recommendation: {
        crop_id: "tomato",
        next_irrigation_eta_s: 7200,
        suggested_duration_s: 444,
        predicted_depletion_frac_per_hr: 0.005,
      },
    });
    expect(deriveDisplay(soon, NOW).etaText).toContain("next irrigation in 2.0 h");
  });
});

describe("override countdown", () => {
  it("counts down from the server-reported remainder", () => {
    const state = polled({
      override: overrideStatus({ state: "off", ttl_remaining_s: 600, reason: "OVERRIDE" }),
    });
    expect(overrideRemainingS(state, NOW)).toBe(600);
    expect(overrideRemainingS(state, NOW + 10_000)).toBe(590);
    expect(overrideRemainingS(state, NOW + 700_000)).toBe(0);
  });

  it("badge clears once the countdown hits zero", () => {
    const state = polled({
      override: overrideStatus({ state: "off", ttl_remaining_s: 600, reason: "OVERRIDE" }),
    });
    expect(deriveDisplay(state, NOW).overrideBadge).toContain("forced off");
    expect(deriveDisplay(state, NOW + 601_000).overrideBadge).toBeNull();
  });

  it("no override, no badge", () => {
    expect(deriveDisplay(polled(), NOW).overrideBadge).toBeNull();
  });
});

describe("formatDuration", () => {
  it("picks sensible units", () => {
    expect(formatDuration(45)).toBe("45 s");
    expect(formatDuration(600)).toBe("10 min");
    expect(formatDuration(108_000)).toBe("30.0 h");
  });
});
