"""Cloud decision side: telemetry store, depletion learning, recommendations.

Telemetry accumulates in an append-only per-node store with strictly
monotone timestamps.  From record pairs where neither pump nor rain was
adding water, the service learns a linear soil-moisture depletion model
(bias, temperature, dryness, normalized light) with a normalized
least-mean-squares step, and turns it into irrigation recommendations:
when the crop will hit its watering threshold and how long to run the
pump.

``DecisionService`` wires the pieces together behind one lock (single
writer, consistent reads) and persists every accepted record to a log in
the wire line format, so crash recovery is just replaying the file.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import sensors
from .controller import FORCED_OFF, FORCED_ON, OVERRIDE, RAIN_GATE, IrrigationPolicy
from .wire import TelemetryRecord, parse_telemetry_line, serialize_record

NLMS_EPSILON = 1e-8
DEFAULT_STALENESS_S = 300.0
MAX_OVERRIDE_TTL_S = 86_400.0

AUTO = "AUTO"


class StaleRecord(Exception):
    """Ingest rejected: timestamp not strictly newer than the node's latest."""

    def __init__(self, node: str, ts_ms: int, latest_ms: int):
        self.node = node
        self.ts_ms = ts_ms
        self.latest_ms = latest_ms
        super().__init__(f"{node}: ts {ts_ms} not after latest {latest_ms}")


class StaleTelemetry(Exception):
    """Recommendation refused: the node's latest record is too old."""


class UnknownNode(KeyError):
    pass


class UnknownCrop(KeyError):
    pass


class TelemetryStore:
    """Append-only records per node, latest snapshot, ingest counter."""

    def __init__(self):
        self._records: dict[str, list[TelemetryRecord]] = {}
        self.ingest_count = 0

    def nodes(self) -> list[str]:
        return sorted(self._records)

    def latest(self, node: str) -> TelemetryRecord | None:
        recs = self._records.get(node)
        return recs[-1] if recs else None

    def ingest(self, rec: TelemetryRecord) -> None:
        latest = self.latest(rec.node)
        if latest is not None and rec.ts_ms <= latest.ts_ms:
            raise StaleRecord(rec.node, rec.ts_ms, latest.ts_ms)
        self._records.setdefault(rec.node, []).append(rec)
        self.ingest_count += 1

    def history(
        self, node: str, from_ms: int | None = None, to_ms: int | None = None
    ) -> list[TelemetryRecord]:
        if node not in self._records:
            raise UnknownNode(node)
        recs = self._records[node]
        lo = from_ms if from_ms is not None else -1
        hi = to_ms if to_ms is not None else float("inf")
        return [r for r in recs if lo <= r.ts_ms <= hi]


def ingest_record(store: TelemetryStore, rec: TelemetryRecord) -> TelemetryStore:
    """Append *rec* (strictly monotone per node) and return the store."""
    store.ingest(rec)
    return store


@dataclass(frozen=True)
class CalibView:
    """What the cloud needs to invert raw counts back to physical estimates."""

    adc: sensors.AdcSpec = sensors.DEFAULT_ADC
    ldr: sensors.LdrParams = sensors.DEFAULT_LDR
    ldr_r_fixed: float = sensors.DEFAULT_LDR_R_FIXED
    vcc: float = sensors.DEFAULT_VCC


DEFAULT_CALIB = CalibView()


def features_from_record(rec: TelemetryRecord, calib: CalibView = DEFAULT_CALIB) -> np.ndarray:
    """Depletion features (bias, temperature, dryness, normalized light).

    Light is reconstructed from the raw divider counts because the wire
    carries counts, not lux.
    """
    lux = sensors.lux_estimate(rec.lux_raw, calib.adc, calib.ldr, calib.ldr_r_fixed, calib.vcc)
    return np.array(
        [1.0, rec.t_c, 1.0 - rec.rh_pct / 100.0, lux / sensors.LIGHT_NORM_LUX], dtype=float
    )


@dataclass(frozen=True)
class ModelCoefficients:
    """Learned depletion law, moisture-fraction per second per feature unit."""

    w: np.ndarray
    n_samples: int = 0
    learning_rate: float = 0.05

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.shape != (4,) or not np.all(np.isfinite(w)):
            raise ValueError("w must be 4 finite coefficients")
        object.__setattr__(self, "w", w)
        if self.n_samples < 0:
            raise ValueError(f"n_samples must be >= 0, got {self.n_samples}")
        if self.learning_rate < 0.0:
            raise ValueError(f"learning_rate must be >= 0, got {self.learning_rate}")


def new_model(learning_rate: float = 0.05) -> ModelCoefficients:
    return ModelCoefficients(w=np.zeros(4), n_samples=0, learning_rate=learning_rate)


def update_model(
    m: ModelCoefficients,
    prev: TelemetryRecord,
    cur: TelemetryRecord,
    calib: CalibView = DEFAULT_CALIB,
) -> ModelCoefficients:
    """One normalized LMS step on the observed depletion between two records.

    Only free-depletion intervals train: if the pump ran or rain fell in
    either record, the model is returned unchanged so inflow never biases
    the learned drain rate.
    """
    if prev.node != cur.node:
        raise ValueError(f"records from different nodes: {prev.node} / {cur.node}")
    if cur.ts_ms <= prev.ts_ms:
        raise ValueError(f"non-monotone timestamps: {prev.ts_ms} -> {cur.ts_ms}")
    if prev.pump or cur.pump or prev.rain or cur.rain:
        return m
    dt_s = (cur.ts_ms - prev.ts_ms) / 1000.0
    y = (prev.m_pct - cur.m_pct) / 100.0 / dt_s
    x = features_from_record(prev, calib)
    err = y - float(m.w @ x)
    w = m.w + m.learning_rate * err * x / (NLMS_EPSILON + float(x @ x))
    return ModelCoefficients(w=w, n_samples=m.n_samples + 1, learning_rate=m.learning_rate)


@dataclass(frozen=True)
class PolicyRecommendation:
    crop_id: str
    next_irrigation_eta_s: float | None
    suggested_duration_s: float
    predicted_depletion_frac_per_hr: float


def recommend_policy(
    m: ModelCoefficients,
    latest: TelemetryRecord,
    pol: IrrigationPolicy,
    pump_rate_ml_per_min: float,
    plot_capacity_ml_per_moisture_pct: float,
    now_ms: int,
    staleness_s: float = DEFAULT_STALENESS_S,
    calib: CalibView = DEFAULT_CALIB,
) -> PolicyRecommendation:
    """Predict when to irrigate next and for how long.

    The ETA is how long the learned depletion takes to drain the latest
    moisture down to the on threshold (0 if already there, absent if the
    model predicts no depletion).  Duration is the pump time needed to
    refill the hysteresis band at the plot's capacity.
    """
    if now_ms - latest.ts_ms > staleness_s * 1000.0:
        raise StaleTelemetry(
            f"latest record for {latest.node} is {(now_ms - latest.ts_ms) / 1000.0:.0f}s old"
        )
    d = max(0.0, float(m.w @ features_from_record(latest, calib)))
    if d == 0.0:
        eta = None
    else:
        eta = max(0.0, (latest.m_pct - pol.m_on_pct) / 100.0 / d)
    pct_per_s = pump_rate_ml_per_min / (60.0 * plot_capacity_ml_per_moisture_pct)
    duration = (pol.m_off_pct - pol.m_on_pct) / pct_per_s
    return PolicyRecommendation(
        crop_id=pol.crop_id,
        next_irrigation_eta_s=eta,
        suggested_duration_s=duration,
        predicted_depletion_frac_per_hr=d * 3600.0,
    )


@dataclass(frozen=True)
class OverridePin:
    """A pending operator override for one node, wall-clock scoped."""

    state: str  # FORCED_ON | FORCED_OFF
    expires_ms: int


class DecisionService:
    """Store + model + policies + overrides behind one writer lock.

    With a ``store_dir`` every accepted record is appended to
    ``telemetry.log`` in the wire format (fsync every ``fsync_every``
    appends); at startup an existing log is replayed to rebuild the
    in-memory state.
    """

    LOG_NAME = "telemetry.log"

    def __init__(
        self,
        store_dir: str | Path | None = None,
        learning_rate: float = 0.05,
        staleness_s: float = DEFAULT_STALENESS_S,
        pump_rate_ml_per_min: float = 135.0,
        plot_capacity_ml_per_moisture_pct: float = 40.0,
        fsync_every: int = 1,
        calib: CalibView = DEFAULT_CALIB,
    ):
        self._lock = threading.Lock()
        self.store = TelemetryStore()
        self.model = new_model(learning_rate)
        self.policies: dict[str, IrrigationPolicy] = {}
        self.overrides: dict[str, OverridePin] = {}
        self.staleness_s = staleness_s
        self.pump_rate_ml_per_min = pump_rate_ml_per_min
        self.plot_capacity = plot_capacity_ml_per_moisture_pct
        self.calib = calib
        self._fsync_every = max(1, fsync_every)
        self._appends = 0
        self._log = None
        if store_dir is not None:
            path = Path(store_dir)
            path.mkdir(parents=True, exist_ok=True)
            log_path = path / self.LOG_NAME
            if log_path.exists():
                self._replay(log_path.read_text(encoding="utf-8"))
            self._log = open(log_path, "a", encoding="utf-8")

    def _replay(self, text: str) -> None:
        for line in text.splitlines():
            if line.strip():
                self._ingest(parse_telemetry_line(line), persist=False)

    def _persist(self, rec: TelemetryRecord) -> None:
        if self._log is None:
            return
        self._log.write(serialize_record(rec) + "\n")
        self._log.flush()
        self._appends += 1
        if self._appends % self._fsync_every == 0:
            os.fsync(self._log.fileno())

    def _ingest(self, rec: TelemetryRecord, persist: bool = True) -> None:
        prev = self.store.latest(rec.node)
        self.store.ingest(rec)
        if prev is not None:
            self.model = update_model(self.model, prev, rec, self.calib)
        if persist:
            self._persist(rec)

    # -- public API, each call atomic under the writer lock ----------------

    def ingest(self, rec: TelemetryRecord) -> None:
        with self._lock:
            self._ingest(rec)

    def ingest_line(self, line: str) -> None:
        self.ingest(parse_telemetry_line(line))

    def replay_file(self, path: str | Path) -> int:
        """Preload a telemetry log through the normal ingest path."""
        n = 0
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if line.strip():
                self.ingest_line(line)
                n += 1
        return n

    def nodes(self) -> list[str]:
        with self._lock:
            return self.store.nodes()

    def latest(self, node: str) -> TelemetryRecord:
        with self._lock:
            rec = self.store.latest(node)
        if rec is None:
            raise UnknownNode(node)
        return rec

    def history(self, node, from_ms=None, to_ms=None) -> list[TelemetryRecord]:
        with self._lock:
            return self.store.history(node, from_ms, to_ms)

    def model_snapshot(self) -> dict:
        with self._lock:
            return {"w": [float(v) for v in self.model.w], "n_samples": self.model.n_samples}

    def put_policy(self, pol: IrrigationPolicy) -> None:
        with self._lock:
            self.policies[pol.crop_id] = pol

    def get_policy(self, crop_id: str) -> IrrigationPolicy:
        with self._lock:
            if crop_id not in self.policies:
                raise UnknownCrop(crop_id)
            return self.policies[crop_id]

    def apply_override(self, node: str, state: str, ttl_s: float, now_ms: int) -> None:
        """Queue an override pin for a node; 'clear' is an idempotent no-op."""
        with self._lock:
            if node not in self.store.nodes():
                raise UnknownNode(node)
            if state == "clear":
                self.overrides.pop(node, None)
                return
            if state not in (FORCED_ON, FORCED_OFF):
                raise ValueError(f"state must be on/off/clear, got {state!r}")
            if not 0.0 < ttl_s <= MAX_OVERRIDE_TTL_S:
                raise ValueError(f"ttl_s must be in (0, {MAX_OVERRIDE_TTL_S:.0f}], got {ttl_s}")
            self.overrides[node] = OverridePin(state=state, expires_ms=now_ms + round(ttl_s * 1000))

    def override_status(self, node: str, now_ms: int) -> dict:
        """Pending override plus the effective pump reason for the node.

        The reason mirrors the edge precedence so operator UIs never have
        to re-derive it: rain gates everything, then an active override,
        otherwise automatic control.
        """
        with self._lock:
            if node not in self.store.nodes():
                raise UnknownNode(node)
            pin = self.overrides.get(node)
            if pin is not None and pin.expires_ms <= now_ms:
                self.overrides.pop(node, None)
                pin = None
            latest = self.store.latest(node)
        if latest is not None and latest.rain:
            reason = RAIN_GATE
        elif pin is not None:
            reason = OVERRIDE
        else:
            reason = AUTO
        return {
            "node": node,
            "state": pin.state if pin else "none",
            "ttl_remaining_s": round((pin.expires_ms - now_ms) / 1000.0, 3) if pin else 0,
            "reason": reason,
        }

    def recommendation(self, crop_id: str, node: str, now_ms: int) -> PolicyRecommendation:
        pol = self.get_policy(crop_id)
        latest = self.latest(node)
        with self._lock:
            model = self.model
        return recommend_policy(
            model,
            latest,
            pol,
            self.pump_rate_ml_per_min,
            self.plot_capacity,
            now_ms,
            self.staleness_s,
            self.calib,
        )

    def close(self) -> None:
        with self._lock:
            if self._log is not None:
                self._log.flush()
                os.fsync(self._log.fileno())
                self._log.close()
                self._log = None
