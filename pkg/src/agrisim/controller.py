"""Edge irrigation node: sampling, pump decision, LCD pages, scenario runner.

Each tick the node reads every modeled sensor through its full electrical
chain (the humidity/temperature sensor through the actual wire codec, at
most once per its sampling period), applies the rain-gated hysteresis
rule, integrates pump flow, and emits one telemetry record.

The pump decision has a strict precedence: rain always forces the pump
off (even over a forced-on operator override), then operator overrides,
then a minimum-on hold against short-cycling, then the hysteresis band.
``run_scenario`` drives the whole node deterministically from a config,
so identical configs produce byte-identical telemetry logs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timezone
from random import Random

from . import dht11, sensors
from .flow import FlowCalib, FlowSample, PulseAccumulator, flow_rate, flow_to_pulses, pulses_to_volume
from .wire import TelemetryRecord

# Pump decision reasons, most dominant first.
RAIN_GATE = "RAIN_GATE"
OVERRIDE = "OVERRIDE"
MIN_ON_HOLD = "MIN_ON_HOLD"
BELOW_ON_THRESHOLD = "BELOW_ON_THRESHOLD"
ABOVE_OFF_THRESHOLD = "ABOVE_OFF_THRESHOLD"
HYSTERESIS_HOLD = "HYSTERESIS_HOLD"

FORCED_ON = "on"
FORCED_OFF = "off"


class ConfigError(ValueError):
    """Invalid policy or scenario configuration; names the failing field."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(message)


@dataclass(frozen=True)
class IrrigationPolicy:
    """Per-crop thresholds and schedule: water at/below m_on, stop at/above m_off."""

    crop_id: str
    m_on_pct: int
    m_off_pct: int
    min_on_s: float = 30.0
    dht_period_s: float = 1.0
    tick_s: float = 1.0

    def __post_init__(self):
        if not 0 <= self.m_on_pct < self.m_off_pct <= 100:
            raise ConfigError(
                "m_on_pct",
                f"m_on_pct must satisfy 0 <= m_on < m_off <= 100, got ({self.m_on_pct}, {self.m_off_pct})",
            )
        if self.min_on_s < 0:
            raise ConfigError("min_on_s", f"min_on_s must be >= 0, got {self.min_on_s}")
        if self.dht_period_s < 1.0:
            raise ConfigError("dht_period_s", f"dht_period_s must be >= 1, got {self.dht_period_s}")
        if self.tick_s <= 0:
            raise ConfigError("tick_s", f"tick_s must be > 0, got {self.tick_s}")


@dataclass(frozen=True)
class Override:
    """Operator pin of the pump state until an absolute node time."""

    kind: str  # FORCED_ON | FORCED_OFF
    until_s: float

    def __post_init__(self):
        if self.kind not in (FORCED_ON, FORCED_OFF):
            raise ValueError(f"override kind must be on/off, got {self.kind!r}")
        if self.until_s < 0:
            raise ValueError(f"until_s must be >= 0, got {self.until_s}")


@dataclass(frozen=True)
class PumpState:
    on: bool = False
    since_s: float = 0.0
    override: Override | None = None


@dataclass(frozen=True)
class PumpCommand:
    on: bool
    reason: str


@dataclass(frozen=True)
class LcdPage:
    line1: str
    line2: str

    def __post_init__(self):
        for name, line in (("line1", self.line1), ("line2", self.line2)):
            if len(line) != 16 or not line.isascii():
                raise ValueError(f"{name} must be exactly 16 ASCII chars, got {line!r}")


@dataclass(frozen=True)
class EdgeConfig:
    """Node identity plus the full sensor/actuator calibration bundle."""

    node: str = "edge-1"
    vcc: float = sensors.DEFAULT_VCC
    adc: sensors.AdcSpec = sensors.DEFAULT_ADC
    ldr: sensors.LdrParams = sensors.DEFAULT_LDR
    ldr_r_fixed: float = sensors.DEFAULT_LDR_R_FIXED
    rain_board: sensors.RainBoardModel = sensors.DEFAULT_RAIN_BOARD
    pressure: sensors.PressureSpec = sensors.DEFAULT_PRESSURE
    flow: FlowCalib = FlowCalib()
    timing: dht11.Dht11Timing = dht11.DEFAULT_TIMING
    pump_rate_ml_per_min: float = 135.0
    # Test hook: mangle the humidity/temperature waveform before decode.
    waveform_tap: object = None


@dataclass(frozen=True)
class NodeState:
    """Everything the node carries between ticks."""

    pump: PumpState = PumpState()
    last_reading: dht11.Dht11Reading | None = None
    last_dht_t_s: float = float("-inf")
    flow_acc: PulseAccumulator = PulseAccumulator()
    vol_ml: float = 0.0
    dht_fault: bool = False


def decide_pump(
    m_pct: int,
    rain: bool,
    state: PumpState,
    pol: IrrigationPolicy,
    now_s: float,
) -> PumpCommand:
    """Rain-gated hysteresis decision.

    Precedence: rain gate, operator override, minimum-on hold, the on
    threshold (<=), the off threshold (>=), otherwise hold the current
    state.  Rain wins over everything including a forced-on override.
    """
    if rain:
        return PumpCommand(False, RAIN_GATE)
    override = state.override
    if override is not None and now_s < override.until_s:
        return PumpCommand(override.kind == FORCED_ON, OVERRIDE)
    if state.on and (now_s - state.since_s) < pol.min_on_s:
        return PumpCommand(True, MIN_ON_HOLD)
    if m_pct <= pol.m_on_pct:
        return PumpCommand(True, BELOW_ON_THRESHOLD)
    if m_pct >= pol.m_off_pct:
        return PumpCommand(False, ABOVE_OFF_THRESHOLD)
    return PumpCommand(state.on, HYSTERESIS_HOLD)


def reading_from_env(env: sensors.EnvState) -> dht11.Dht11Reading:
    """What the humidity/temperature part would report: tenths resolution,
    saturated to its measurable ranges."""
    rh = sensors.clamp(round(env.rh_pct, 1), dht11.RH_INT_MIN, dht11.RH_INT_MAX)
    t = sensors.clamp(round(env.temp_c, 1), dht11.T_INT_MIN, dht11.T_INT_MAX)
    rh_tenths = round(rh * 10)
    t_tenths = round(t * 10)
    return dht11.Dht11Reading(rh_tenths // 10, rh_tenths % 10, t_tenths // 10, t_tenths % 10)


_MIN_READING = dht11.Dht11Reading(dht11.RH_INT_MIN, 0, dht11.T_INT_MIN, 0)


def _read_dht(env: sensors.EnvState, cfg: EdgeConfig) -> dht11.Dht11Reading:
    """One full sample through the wire: encode, emit waveform, decode."""
    frame = dht11.encode_reading(reading_from_env(env))
    segs = dht11.frame_to_waveform(frame, cfg.timing)
    if cfg.waveform_tap is not None:
        segs = cfg.waveform_tap(segs)
    return dht11.frame_to_reading(dht11.decode_waveform(segs, cfg.timing))


def step_node(
    t_s: float,
    env: sensors.EnvState,
    state: NodeState,
    pol: IrrigationPolicy,
    cfg: EdgeConfig,
    rng: Random | None = None,
) -> tuple[TelemetryRecord, PumpCommand, NodeState]:
    """One tick: integrate flow, sample sensors, decide, emit a record.

    Flow covers the interval just elapsed, so it uses the pump state
    decided last tick.  The humidity/temperature sensor is re-read only
    when its sampling period has passed; a codec failure keeps the last
    known reading and flags the tick as degraded.
    """
    pump_was_on = state.pump.on
    pulses, acc = flow_to_pulses(
        cfg.pump_rate_ml_per_min if pump_was_on else 0.0, pol.tick_s, state.flow_acc, cfg.flow, rng
    )
    vol_ml = state.vol_ml + pulses_to_volume(pulses, cfg.flow)
    sample = FlowSample(pulses, pol.tick_s, flow_rate(pulses, pol.tick_s, cfg.flow), vol_ml)

    reading = state.last_reading
    last_dht_t_s = state.last_dht_t_s
    fault = False
    if reading is None or t_s - last_dht_t_s >= pol.dht_period_s:
        try:
            reading = _read_dht(env, cfg)
            last_dht_t_s = t_s
        except dht11.Dht11Error:
            fault = True
            if reading is None:
                reading = _MIN_READING

    m_v = sensors.soil_moisture_voltage(env.moisture)
    m_raw = sensors.adc_quantize(m_v, cfg.adc)
    m_pct = sensors.moisture_pct_from_counts(m_raw, cfg.adc)
    _, rain = sensors.rain_signals(env.rain_wetness, cfg.rain_board, cfg.vcc)
    ldr_v = sensors.divider_voltage(
        sensors.ldr_resistance(env.light_lux, cfg.ldr), cfg.ldr_r_fixed, cfg.vcc
    )
    lux_raw = sensors.adc_quantize(ldr_v, cfg.adc)
    p_kpa = sensors.pressure_from_counts(
        sensors.pressure_counts(env.soil_pressure_kpa, cfg.pressure), cfg.pressure
    )

    cmd = decide_pump(m_pct, rain, state.pump, pol, t_s)
    override = state.pump.override
    if override is not None and t_s >= override.until_s:
        override = None
    pump = PumpState(
        on=cmd.on,
        since_s=t_s if (cmd.on and not pump_was_on) else state.pump.since_s,
        override=override,
    )

    rec = TelemetryRecord(
        node=cfg.node,
        ts_ms=round(t_s * 1000),
        t_c=reading.temp_c,
        rh_pct=reading.rh,
        m_pct=m_pct,
        m_raw=m_raw,
        rain=int(rain),
        lux_raw=lux_raw,
        p_kpa=p_kpa,
        f_mlmin=sample.rate_ml_per_min,
        vol_ml=vol_ml,
        pump=int(cmd.on),
        dht_fault=fault,
    )
    new_state = NodeState(
        pump=pump,
        last_reading=reading,
        last_dht_t_s=last_dht_t_s,
        flow_acc=acc,
        vol_ml=vol_ml,
        dht_fault=fault,
    )
    return rec, cmd, new_state


def _sat(value: float, width: int) -> int:
    return int(sensors.clamp(round(value), 0, 10**width - 1))


def format_lcd(rec: TelemetryRecord, page: int) -> LcdPage:
    """16x2 display pages; values saturate at their field widths."""
    if page not in (0, 1):
        raise ValueError(f"page must be 0 or 1, got {page}")
    stamp = datetime.fromtimestamp(rec.ts_ms / 1000.0, tz=timezone.utc)
    if page == 0:
        line1 = f"T:{_sat(rec.t_c, 2):02d}C H:{_sat(rec.rh_pct, 2):02d}% R:{rec.rain} "
        line2 = f"M:{_sat(rec.m_pct, 2):02d}% P:{rec.pump} {stamp:%H:%M} "
    else:
        line1 = f"D:{stamp:%Y-%m-%d}    "
        line2 = f"F:{_sat(rec.f_mlmin, 4):04d} V:{_sat(rec.vol_ml, 6):06d} "
    return LcdPage(line1, line2)


@dataclass(frozen=True)
class LightProfile:
    """Diurnal light: a half-sine of the given peak over the daylight hours."""

    peak_lux: float = 80_000.0
    day_length_s: float = 43_200.0

    def __post_init__(self):
        if self.peak_lux < 0:
            raise ConfigError("peak_lux", f"peak_lux must be >= 0, got {self.peak_lux}")
        if not 0 < self.day_length_s <= 86_400.0:
            raise ConfigError(
                "day_length_s", f"day_length_s must be in (0, 86400], got {self.day_length_s}"
            )

    def lux_at(self, t_s: float) -> float:
        tau = t_s % 86_400.0
        if tau >= self.day_length_s:
            return 0.0
        return self.peak_lux * math.sin(math.pi * tau / self.day_length_s)


DEFAULT_DYNAMICS = sensors.EnvDynamics(
    k_pump=0.002,
    k_rain=0.001,
    w=(5e-6, 2e-7, 3e-5, 1.5e-5),
    pressure_base_kpa=10.0,
    pressure_per_moisture_kpa=25.0,
)

DEFAULT_INITIAL = sensors.EnvState(
    moisture=0.5,
    rain_wetness=0.0,
    light_lux=0.0,
    temp_c=25.0,
    rh_pct=60.0,
    soil_pressure_kpa=22.5,
)


@dataclass(frozen=True)
class ScenarioConfig:
    """Deterministic full-system run: who, how long, what weather."""

    seed: int
    duration_s: float
    policy: IrrigationPolicy
    dynamics: sensors.EnvDynamics = DEFAULT_DYNAMICS
    initial: sensors.EnvState = DEFAULT_INITIAL
    rain_intervals: tuple[tuple[float, float, float], ...] = ()
    light_profile: LightProfile = LightProfile()
    pump_rate_ml_per_min: float = 135.0
    noise: bool = False
    node: str = "edge-1"

    def __post_init__(self):
        if self.duration_s <= 0:
            raise ConfigError("duration_s", f"duration_s must be > 0, got {self.duration_s}")
        if self.pump_rate_ml_per_min <= 0:
            raise ConfigError(
                "pump_rate_ml_per_min",
                f"pump_rate_ml_per_min must be > 0, got {self.pump_rate_ml_per_min}",
            )
        for iv in self.rain_intervals:
            start, end, wetness = iv
            if not 0 <= start < end <= self.duration_s:
                raise ConfigError("rain_intervals", f"interval {iv} outside the run duration")
            if not 0.0 <= wetness <= 1.0:
                raise ConfigError("rain_intervals", f"wetness {wetness} outside [0, 1]")

    def rain_at(self, t_s: float) -> float:
        for start, end, wetness in self.rain_intervals:
            if start <= t_s <= end:
                return wetness
        return 0.0


def _require(obj: dict, key: str, kind, where: str):
    if key not in obj:
        raise ConfigError(key, f"{where} is missing required field {key}")
    value = obj[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ConfigError(key, f"{where}.{key} must be {kind.__name__}, got {value!r}")
    return value


def scenario_from_dict(obj: dict) -> ScenarioConfig:
    """Build a validated ScenarioConfig from a parsed scenario file.

    Every rejection names the offending field so the CLI can surface it.
    """
    if not isinstance(obj, dict):
        raise ConfigError("scenario", "scenario file must hold a JSON object")
    polobj = _require(obj, "policy", dict, "scenario")
    policy = IrrigationPolicy(
        crop_id=_require(polobj, "crop_id", str, "policy"),
        m_on_pct=_require(polobj, "m_on_pct", int, "policy"),
        m_off_pct=_require(polobj, "m_off_pct", int, "policy"),
        min_on_s=_require(polobj, "min_on_s", float, "policy") if "min_on_s" in polobj else 30.0,
        dht_period_s=_require(polobj, "dht_period_s", float, "policy")
        if "dht_period_s" in polobj
        else 1.0,
        tick_s=_require(polobj, "tick_s", float, "policy") if "tick_s" in polobj else 1.0,
    )
    dynamics = DEFAULT_DYNAMICS
    if "dynamics" in obj:
        d = _require(obj, "dynamics", dict, "scenario")
        w = d.get("w", list(DEFAULT_DYNAMICS.w))
        if not isinstance(w, list) or len(w) != 4:
            raise ConfigError("w", "dynamics.w must be a list of 4 coefficients")
        try:
            dynamics = sensors.EnvDynamics(
                k_pump=float(d.get("k_pump", DEFAULT_DYNAMICS.k_pump)),
                k_rain=float(d.get("k_rain", DEFAULT_DYNAMICS.k_rain)),
                w=tuple(float(v) for v in w),
                pressure_base_kpa=float(
                    d.get("pressure_base_kpa", DEFAULT_DYNAMICS.pressure_base_kpa)
                ),
                pressure_per_moisture_kpa=float(
                    d.get("pressure_per_moisture_kpa", DEFAULT_DYNAMICS.pressure_per_moisture_kpa)
                ),
            )
        except ValueError as exc:
            raise ConfigError("dynamics", f"dynamics: {exc}") from exc
    initial = DEFAULT_INITIAL
    if "initial" in obj:
        e = _require(obj, "initial", dict, "scenario")
        try:
            initial = sensors.EnvState(
                moisture=float(e.get("moisture", DEFAULT_INITIAL.moisture)),
                rain_wetness=float(e.get("rain_wetness", 0.0)),
                light_lux=float(e.get("light_lux", 0.0)),
                temp_c=float(e.get("temp_c", DEFAULT_INITIAL.temp_c)),
                rh_pct=float(e.get("rh_pct", DEFAULT_INITIAL.rh_pct)),
                soil_pressure_kpa=float(e.get("soil_pressure_kpa", DEFAULT_INITIAL.soil_pressure_kpa)),
            )
        except ValueError as exc:
            raise ConfigError("initial", f"initial: {exc}") from exc
    intervals = []
    for iv in obj.get("rain_intervals", []):
        if not isinstance(iv, (list, tuple)) or len(iv) != 3:
            raise ConfigError("rain_intervals", f"rain interval must be [start, end, wetness], got {iv!r}")
        intervals.append((float(iv[0]), float(iv[1]), float(iv[2])))
    profile = LightProfile()
    if "light_profile" in obj:
        lp = _require(obj, "light_profile", dict, "scenario")
        profile = LightProfile(
            peak_lux=float(lp.get("peak_lux", profile.peak_lux)),
            day_length_s=float(lp.get("day_length_s", profile.day_length_s)),
        )
    return ScenarioConfig(
        seed=_require(obj, "seed", int, "scenario") if "seed" in obj else 0,
        duration_s=_require(obj, "duration_s", float, "scenario"),
        policy=policy,
        dynamics=dynamics,
        initial=initial,
        rain_intervals=tuple(intervals),
        light_profile=profile,
        pump_rate_ml_per_min=float(obj.get("pump_rate_ml_per_min", 135.0)),
        noise=bool(obj.get("noise", False)),
        node=str(obj.get("node", "edge-1")),
    )


def run_scenario(cfg: ScenarioConfig, edge: EdgeConfig | None = None) -> list[TelemetryRecord]:
    """Run the node for the configured duration; one record per tick.

    A single deterministic loop: evolve the environment under the pump
    state decided last tick, then sample and decide.  Identical configs
    (seed included) produce identical record sequences.
    """
    pol = cfg.policy
    if edge is None:
        edge = EdgeConfig(
            node=cfg.node,
            pump_rate_ml_per_min=cfg.pump_rate_ml_per_min,
            flow=FlowCalib(noise_frac=0.10 if cfg.noise else 0.0),
        )
    rng = Random(cfg.seed)
    env = cfg.initial
    state = NodeState()
    records: list[TelemetryRecord] = []
    n_ticks = int(round(cfg.duration_s / pol.tick_s))
    for k in range(1, n_ticks + 1):
        t = k * pol.tick_s
        env = sensors.env_step(
            env, cfg.dynamics, pol.tick_s, state.pump.on, cfg.rain_at(t), cfg.light_profile.lux_at(t)
        )
        rec, _, state = step_node(t, env, state, pol, edge, rng)
        records.append(rec)
    return records
