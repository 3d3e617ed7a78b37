#!/usr/bin/env python3
"""Walk one environment snapshot through every sensor's electrical chain.

Shows what the edge node actually sees: ground truth -> resistance or
voltage -> ADC counts -> the reconstructed value the cloud side works with.
"""

from agrisim import sensors

env = sensors.EnvState(
    moisture=0.45,
    rain_wetness=0.6,
    light_lux=20_000.0,
    temp_c=25.0,
    rh_pct=65.0,
    soil_pressure_kpa=21.25,
)

print("ground truth:", env, "\n")

# soil moisture probe: 5 V dry .. 0 V saturated, then 10-bit ADC
v = sensors.soil_moisture_voltage(env.moisture)
counts = sensors.adc_quantize(v)
print(f"soil probe     : {env.moisture:.2f} -> {v:.3f} V -> {counts} counts "
      f"-> {sensors.moisture_pct_from_counts(counts)} %")

# photoresistor -> divider -> ADC, and the cloud-side inverse estimate
r = sensors.ldr_resistance(env.light_lux, sensors.DEFAULT_LDR)
v = sensors.divider_voltage(r, sensors.DEFAULT_LDR_R_FIXED, sensors.DEFAULT_VCC)
counts = sensors.adc_quantize(v)
print(f"light          : {env.light_lux:.0f} lux -> {r:.1f} ohm -> {v:.3f} V "
      f"-> {counts} counts -> est {sensors.lux_estimate(counts):.0f} lux")

# rain board against its comparator set point
analog, detected = sensors.rain_signals(env.rain_wetness, sensors.DEFAULT_RAIN_BOARD, 5.0)
print(f"rain board     : wetness {env.rain_wetness:.1f} -> {analog:.3f} V "
      f"-> {'RAIN' if detected else 'dry'} (threshold {sensors.DEFAULT_RAIN_BOARD.v_threshold} V)")

# pressure bridge: kPa -> signed 24-bit counts -> back
counts = sensors.pressure_counts(env.soil_pressure_kpa)
back = sensors.pressure_from_counts(counts)
print(f"pressure bridge: {env.soil_pressure_kpa:.2f} kPa -> {counts} counts -> {back:.4f} kPa")

# one hour of free depletion on a warm afternoon
dyn = sensors.EnvDynamics(
    k_pump=0.002, k_rain=0.001, w=(5e-6, 2e-7, 3e-5, 1.5e-5),
    pressure_base_kpa=10.0, pressure_per_moisture_kpa=25.0,
)
after = sensors.env_step(env, dyn, 3600.0, pump_on=False, weather_rain=0.0, weather_light=60_000.0)
print(f"\nafter one dry sunny hour: moisture {env.moisture:.4f} -> {after.moisture:.4f} "
      f"(depletion {sensors.depletion_rate(dyn, env.temp_c, env.rh_pct, 60_000.0):.2e}/s)")
