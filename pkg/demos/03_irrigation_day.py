#!/usr/bin/env python3
"""A two-hour irrigation scenario: dry soil, a rain shower, pump cycling.

Prints an hourly strip chart of moisture with pump and rain markers, plus
the LCD pages a field operator would see at the end.
"""

from agrisim.controller import (
    IrrigationPolicy,
    LightProfile,
    ScenarioConfig,
    format_lcd,
    run_scenario,
)
from agrisim.sensors import EnvDynamics, EnvState
from agrisim.wire import serialize_record

cfg = ScenarioConfig(
    seed=7,
    duration_s=7_200.0,
    policy=IrrigationPolicy(crop_id="tomato", m_on_pct=35, m_off_pct=60, min_on_s=30.0),
    dynamics=EnvDynamics(
        k_pump=0.0015, k_rain=0.002, w=(6e-5, 1e-6, 2e-5, 1e-5),
        pressure_base_kpa=10.0, pressure_per_moisture_kpa=25.0,
    ),
    initial=EnvState(0.38, 0.0, 0.0, 28.0, 55.0, 19.5),
    rain_intervals=((3_600.0, 4_500.0, 1.0),),  # a 15-minute downpour
    light_profile=LightProfile(peak_lux=80_000.0, day_length_s=43_200.0),
)

records = run_scenario(cfg)
print(f"{len(records)} records; last line of the log:")
print(serialize_record(records[-1]))

print("\n   time  moisture  pump rain")
for rec in records[299::300]:  # every 5 minutes
    bar = "#" * (rec.m_pct // 2)
    mins = rec.ts_ms // 60_000
    marks = ("P" if rec.pump else " ") + ("R" if rec.rain else " ")
    print(f"  {mins:3d} min  {rec.m_pct:3d}% {marks}  |{bar}")

pump_duty = sum(r.pump for r in records) / len(records)
print(f"\npump duty {pump_duty:.1%}, delivered {records[-1].vol_ml:.1f} mL")

print("\nLCD at the final tick:")
for page in (0, 1):
    lcd = format_lcd(records[-1], page)
    print(f"  +{'-' * 16}+\n  |{lcd.line1}|\n  |{lcd.line2}|\n  +{'-' * 16}+")
