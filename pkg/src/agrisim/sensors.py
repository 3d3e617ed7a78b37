"""Sensor transfer functions and the simulated environment they observe.

Models the measurement chain of a small irrigation rig: photoresistor ->
voltage divider -> 10-bit ADC for light, a resistive rain board compared
against a comparator set point, a soil probe with a 5 V..0 V analog swing,
and a 0-40 kPa pressure bridge read out as signed 24-bit counts.  The
inverse maps the cloud side needs (counts back to lux / moisture percent /
kPa) live here too, so edge and service share one calibration.

``env_step`` advances the ground truth itself: pump and rain inflow raise
soil moisture, a linear depletion law (base + temperature + dryness +
light terms) drains it, and soil pressure tracks the new moisture.

Everything is pure and reentrant; callers own all state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Full-sun normalization for the light term of the depletion law.
LIGHT_NORM_LUX = 100_000.0


def clamp(value: float, lo: float, hi: float) -> float:
    """Clamp *value* to [lo, hi]."""
    return max(lo, min(hi, value))


@dataclass(frozen=True)
class EnvState:
    """Ground truth the sensors observe.

    moisture and rain_wetness are fractions in [0, 1]; light_lux >= 0;
    soil_pressure_kpa stays within the 0-40 kPa bridge range.
    """

    moisture: float
    rain_wetness: float
    light_lux: float
    temp_c: float
    rh_pct: float
    soil_pressure_kpa: float

    def __post_init__(self):
        if not 0.0 <= self.moisture <= 1.0:
            raise ValueError(f"moisture must be in [0, 1], got {self.moisture}")
        if not 0.0 <= self.rain_wetness <= 1.0:
            raise ValueError(f"rain_wetness must be in [0, 1], got {self.rain_wetness}")
        if self.light_lux < 0.0:
            raise ValueError(f"light_lux must be >= 0, got {self.light_lux}")
        if not 0.0 <= self.soil_pressure_kpa <= 40.0:
            raise ValueError(
                f"soil_pressure_kpa must be in [0, 40], got {self.soil_pressure_kpa}"
            )


@dataclass(frozen=True)
class LdrParams:
    """Photoresistor law: dark resistance ceiling and a power-law slope."""

    r_dark: float
    r_at_10lux: float
    gamma: float = 0.8

    def __post_init__(self):
        if not self.r_dark > self.r_at_10lux > 0.0:
            raise ValueError("LDR requires r_dark > r_at_10lux > 0")
        if self.gamma <= 0.0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")


@dataclass(frozen=True)
class AdcSpec:
    """Ideal ADC: floor quantization of vref into 2**bits codes."""

    vref: float = 5.0
    bits: int = 10

    def __post_init__(self):
        if self.bits < 1:
            raise ValueError(f"bits must be >= 1, got {self.bits}")
        if self.vref <= 0.0:
            raise ValueError(f"vref must be > 0, got {self.vref}")

    @property
    def full_scale(self) -> int:
        return (1 << self.bits) - 1


@dataclass(frozen=True)
class RainBoardModel:
    """Rain board as a wetness-dependent resistor on the bottom divider leg.

    Bottom-leg placement makes dry -> high analog voltage and wet -> low,
    so "analog < v_threshold" reads as rain detected.
    """

    r_dry: float
    r_wet: float
    r_fixed: float
    v_threshold: float

    def __post_init__(self):
        if not self.r_dry > self.r_wet > 0.0:
            raise ValueError("rain board requires r_dry > r_wet > 0")
        if self.r_fixed <= 0.0:
            raise ValueError(f"r_fixed must be > 0, got {self.r_fixed}")
        if self.v_threshold <= 0.0:
            raise ValueError(f"v_threshold must be > 0, got {self.v_threshold}")


@dataclass(frozen=True)
class PressureSpec:
    """0-40 kPa bridge behind a PGA (gain 32/64/128) and a 24-bit converter."""

    full_scale_kpa: float = 40.0
    gain: int = 128
    rate_sps: int = 10

    def __post_init__(self):
        if self.gain not in (32, 64, 128):
            raise ValueError(f"gain must be one of 32/64/128, got {self.gain}")
        if self.rate_sps not in (10, 80):
            raise ValueError(f"rate_sps must be 10 or 80, got {self.rate_sps}")
        if self.full_scale_kpa != 40.0:
            raise ValueError("full_scale_kpa is fixed at 40")


@dataclass(frozen=True)
class EnvDynamics:
    """Coefficients of the ground-truth evolution.

    ``w`` is the true depletion law (base, per degC, per unit dryness, per
    unit normalized light), each in moisture-fraction per second.  Pressure
    is an affine function of moisture and must stay inside 0-40 kPa.
    """

    k_pump: float
    k_rain: float
    w: tuple[float, float, float, float]
    pressure_base_kpa: float
    pressure_per_moisture_kpa: float

    def __post_init__(self):
        if self.k_pump <= 0.0:
            raise ValueError(f"k_pump must be > 0, got {self.k_pump}")
        if self.k_rain < 0.0:
            raise ValueError(f"k_rain must be >= 0, got {self.k_rain}")
        if len(self.w) != 4 or any(wi < 0.0 for wi in self.w):
            raise ValueError("w must be 4 non-negative coefficients")
        for m in (0.0, 1.0):
            p = self.pressure_base_kpa + self.pressure_per_moisture_kpa * m
            if not 0.0 <= p <= 40.0:
                raise ValueError("pressure output leaves [0, 40] kPa over moisture [0, 1]")


# Shared desk-rig calibration, used by the edge defaults and by the cloud
# side when reconstructing lux from raw counts.
DEFAULT_VCC = 5.0
DEFAULT_ADC = AdcSpec(vref=5.0, bits=10)
DEFAULT_LDR = LdrParams(r_dark=1e12, r_at_10lux=10_000.0, gamma=0.8)
DEFAULT_LDR_R_FIXED = 10_000.0
DEFAULT_RAIN_BOARD = RainBoardModel(
    r_dry=1_000_000.0, r_wet=10_000.0, r_fixed=470_000.0, v_threshold=3.0
)
DEFAULT_PRESSURE = PressureSpec()


def ldr_resistance(lux: float, p: LdrParams) -> float:
    """Photoresistor resistance at *lux*, capped at the dark resistance."""
    if lux < 0.0:
        raise ValueError(f"lux must be >= 0, got {lux}")
    if lux == 0.0:
        return p.r_dark
    return min(p.r_dark, p.r_at_10lux * (lux / 10.0) ** (-p.gamma))


def divider_voltage(r_sensor: float, r_fixed: float, vcc: float) -> float:
    """Voltage across the fixed bottom resistor, sensor on the top leg."""
    if r_fixed <= 0.0:
        raise ValueError(f"r_fixed must be > 0, got {r_fixed}")
    if vcc <= 0.0:
        raise ValueError(f"vcc must be > 0, got {vcc}")
    if r_sensor < 0.0:
        raise ValueError(f"r_sensor must be >= 0, got {r_sensor}")
    return min(vcc * r_fixed / (r_sensor + r_fixed), vcc)  # rounding can overshoot vcc by 1 ulp


def adc_quantize(v: float, spec: AdcSpec = DEFAULT_ADC) -> int:
    """Floor-quantize *v* into [0, 2**bits - 1]; out-of-range clamps."""
    code = math.floor(v / spec.vref * (1 << spec.bits))
    return int(clamp(code, 0, spec.full_scale))


def adc_midcode_voltage(counts: int, spec: AdcSpec = DEFAULT_ADC) -> float:
    """Mid-code voltage estimate for a raw ADC reading (inverse of quantize)."""
    if not 0 <= counts <= spec.full_scale:
        raise ValueError(f"counts must be in [0, {spec.full_scale}], got {counts}")
    return (counts + 0.5) * spec.vref / (1 << spec.bits)


def soil_moisture_voltage(moisture: float) -> float:
    """Analog probe output: 5 V bone dry, linear down to 0 V saturated."""
    if not 0.0 <= moisture <= 1.0:
        raise ValueError(f"moisture must be in [0, 1], got {moisture}")
    return 5.0 * (1.0 - moisture)


def soil_moisture_digital_low(analog_v: float, set_point_v: float) -> bool:
    """Digital companion pin: LOW (True, moisture suitable) iff analog < set point."""
    return analog_v < set_point_v


def moisture_pct_from_counts(counts: int, spec: AdcSpec = DEFAULT_ADC) -> int:
    """Integer moisture percent from raw soil-probe counts (0 = dry)."""
    if not 0 <= counts <= spec.full_scale:
        raise ValueError(f"counts must be in [0, {spec.full_scale}], got {counts}")
    return int(clamp(round(100.0 * (spec.full_scale - counts) / spec.full_scale), 0, 100))


def rain_signals(wetness: float, m: RainBoardModel, vcc: float) -> tuple[float, bool]:
    """Analog divider output and the comparator's rain flag.

    Board resistance interpolates linearly from r_dry to r_wet.  The board
    sits on the bottom leg, so the output is taken across the board and
    falls as it gets wet; detection is a strict ``analog < v_threshold``
    (equality means no rain).
    """
    if not 0.0 <= wetness <= 1.0:
        raise ValueError(f"wetness must be in [0, 1], got {wetness}")
    if not m.v_threshold < vcc:
        raise ValueError(f"v_threshold must be below vcc, got {m.v_threshold} >= {vcc}")
    r_board = m.r_dry + wetness * (m.r_wet - m.r_dry)
    analog = vcc * r_board / (r_board + m.r_fixed)
    return analog, analog < m.v_threshold


_COUNTS_24BIT_MAX = (1 << 23) - 1


def pressure_counts(p_kpa: float, spec: PressureSpec = DEFAULT_PRESSURE) -> int:
    """Signed 24-bit converter counts for a 0-40 kPa input at the set gain."""
    if not 0.0 <= p_kpa <= spec.full_scale_kpa:
        raise ValueError(f"p_kpa must be in [0, {spec.full_scale_kpa}], got {p_kpa}")
    counts = round(p_kpa / spec.full_scale_kpa * _COUNTS_24BIT_MAX * spec.gain / 128.0)
    return int(clamp(counts, -(1 << 23), _COUNTS_24BIT_MAX))


def pressure_from_counts(counts: int, spec: PressureSpec = DEFAULT_PRESSURE) -> float:
    """Invert pressure_counts; agrees with the input within one count."""
    return counts * spec.full_scale_kpa * 128.0 / (_COUNTS_24BIT_MAX * spec.gain)


def lux_estimate(
    counts: int,
    adc: AdcSpec = DEFAULT_ADC,
    ldr: LdrParams = DEFAULT_LDR,
    r_fixed: float = DEFAULT_LDR_R_FIXED,
    vcc: float = DEFAULT_VCC,
) -> float:
    """Reconstruct lux from raw LDR-divider counts (ADC -> divider -> LDR inverse)."""
    v = adc_midcode_voltage(counts, adc)
    if v >= vcc:
        v = vcc * (1.0 - 1e-12)
    r_sensor = max(r_fixed * (vcc - v) / v, 1e-9)
    if r_sensor >= ldr.r_dark:
        return 0.0
    return 10.0 * (r_sensor / ldr.r_at_10lux) ** (-1.0 / ldr.gamma)


def depletion_rate(dyn: EnvDynamics, temp_c: float, rh_pct: float, light_lux: float) -> float:
    """Free depletion of soil moisture, fraction per second."""
    w0, w1, w2, w3 = dyn.w
    return w0 + w1 * temp_c + w2 * (1.0 - rh_pct / 100.0) + w3 * (light_lux / LIGHT_NORM_LUX)


def env_step(
    env: EnvState,
    dyn: EnvDynamics,
    dt: float,
    pump_on: bool,
    weather_rain: float,
    weather_light: float,
) -> EnvState:
    """Advance the ground truth by *dt* seconds.

    Moisture integrates pump and rain inflow against the depletion law and
    clamps to [0, 1]; wetness and light follow the commanded weather;
    pressure tracks the new moisture.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if not 0.0 <= weather_rain <= 1.0:
        raise ValueError(f"weather_rain must be in [0, 1], got {weather_rain}")
    if weather_light < 0.0:
        raise ValueError(f"weather_light must be >= 0, got {weather_light}")
    inflow = dyn.k_pump * (1.0 if pump_on else 0.0) + dyn.k_rain * weather_rain
    drain = depletion_rate(dyn, env.temp_c, env.rh_pct, weather_light)
    moisture = clamp(env.moisture + (inflow - drain) * dt, 0.0, 1.0)
    return EnvState(
        moisture=moisture,
        rain_wetness=weather_rain,
        light_lux=weather_light,
        temp_c=env.temp_c,
        rh_pct=env.rh_pct,
        soil_pressure_kpa=dyn.pressure_base_kpa + dyn.pressure_per_moisture_kpa * moisture,
    )
