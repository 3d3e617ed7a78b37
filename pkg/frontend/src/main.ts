/**
 * DOM wiring: a 2 s poll loop over the service API, a policy form, and
 * override buttons. All decision content on screen comes from the service;
 * this file only moves payloads into elements.
 *
 * Runtime config: `?api=http://host:port` overrides the service URL
 * (default same origin), `?node=` and `?crop=` select the targets.
 */

import { ApiClient, ApiError } from "./api.js";
import { DEFAULT_GEOMETRY, moisturePoints, thresholdY } from "./chart.js";
import {
  applyPolicy,
  applyPoll,
  applyPollFailure,
  ConsoleState,
  deriveDisplay,
  initialState,
} from "./state.js";
import { validatePolicyBand } from "./validate.js";

const POLL_MS = 2000;

const params = new URLSearchParams(window.location.search);
const api = new ApiClient(params.get("api") ?? "");
const node = params.get("node") ?? "edge-1";
const crop = params.get("crop") ?? "tomato";

let state: ConsoleState = initialState();
let pollSeq = 0;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function render(): void {
  const display = deriveDisplay(state, Date.now());
  const pump = el<HTMLSpanElement>("pump-state");
  pump.textContent = display.pumpOn === null ? "?" : display.pumpOn ? "ON" : "OFF";
  pump.className = display.pumpOn ? "pump on" : "pump off";
  el("pump-reason").textContent = display.pumpReason ?? "";
  const list = el<HTMLDListElement>("live-values");
  list.replaceChildren(
    ...display.values.flatMap(({ label, text }) => {
      const dt = document.createElement("dt");
      dt.textContent = label;
      const dd = document.createElement("dd");
      dd.textContent = text;
      return [dt, dd];
    }),
  );
  const badge = el("override-badge");
  badge.textContent = display.overrideBadge ?? "";
  badge.hidden = display.overrideBadge === null;
  const banner = el("stale-banner");
  banner.textContent = display.staleBanner ?? "";
  banner.hidden = display.staleBanner === null;
  el("recommendation").textContent = display.etaText ?? "no recommendation yet";
  el<HTMLElement>("chart-line").setAttribute("points", moisturePoints(state.history));
  if (state.policy) {
    for (const [id, pct] of [["guide-on", state.policy.m_on_pct], ["guide-off", state.policy.m_off_pct]] as const) {
      const y = thresholdY(pct).toFixed(1);
      const guide = el<HTMLElement>(id);
      guide.setAttribute("y1", y);
      guide.setAttribute("y2", y);
      guide.setAttribute("x1", String(DEFAULT_GEOMETRY.pad));
      guide.setAttribute("x2", String(DEFAULT_GEOMETRY.width - DEFAULT_GEOMETRY.pad));
    }
  }
}

async function poll(): Promise<void> {
  const seq = ++pollSeq;
  try {
    const [latest, history, override] = await Promise.all([
      api.latest(node),
      api.history(node),
      api.overrideStatus(node),
    ]);
    let recommendation = null;
    try {
      recommendation = await api.recommendation(crop, node);
    } catch {
      /* no policy yet, or telemetry stale: recommendation stays empty */
    }
    state = applyPoll(state, seq, { latest, history, override, recommendation }, Date.now());
  } catch {
    state = applyPollFailure(state, seq);
  }
  render();
}

async function loadPolicy(): Promise<void> {
  try {
    state = applyPolicy(state, await api.policy(crop));
    el<HTMLInputElement>("m-on").value = String(state.policy!.m_on_pct);
    el<HTMLInputElement>("m-off").value = String(state.policy!.m_off_pct);
  } catch {
    /* crop has no stored policy yet; the form stays editable */
  }
  render();
}

function toast(message: string): void {
  const box = el("toast");
  box.textContent = message;
  box.hidden = false;
  window.setTimeout(() => {
    box.hidden = true;
  }, 4000);
}

function wireForms(): void {
  el<HTMLFormElement>("policy-form").addEventListener("submit", (event) => {
    event.preventDefault();
    const mOn = Number(el<HTMLInputElement>("m-on").value);
    const mOff = Number(el<HTMLInputElement>("m-off").value);
    const error = validatePolicyBand(mOn, mOff);
    const errorBox = el("policy-error");
    if (error) {
      errorBox.textContent = error.message; // invalid input never reaches the wire
      errorBox.hidden = false;
      return;
    }
    errorBox.hidden = true;
    api
      .putPolicy(crop, mOn, mOff)
      .then(() => loadPolicy()) // re-fetch: the server copy is the truth
      .catch((err: unknown) => {
        errorBox.textContent = err instanceof ApiError ? err.message : String(err);
        errorBox.hidden = false;
      });
  });

  const sendOverride = (stateName: "on" | "off" | "clear") => {
    const ttl = Number(el<HTMLInputElement>("override-ttl").value) || 600;
    api
      .postOverride(node, stateName, stateName === "clear" ? undefined : ttl)
      .then(() => poll())
      .catch((err: unknown) => toast(err instanceof ApiError ? err.message : String(err)));
  };
  el("override-on").addEventListener("click", () => sendOverride("on"));
  el("override-off").addEventListener("click", () => sendOverride("off"));
  el("override-clear").addEventListener("click", () => sendOverride("clear"));
}

el("node-name").textContent = node;
el("crop-name").textContent = crop;
wireForms();
void loadPolicy();
void poll();
window.setInterval(() => void poll(), POLL_MS);
window.setInterval(render, 1000); // keeps the countdown badge ticking
