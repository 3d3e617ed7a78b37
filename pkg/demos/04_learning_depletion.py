#!/usr/bin/env python3
"""The cloud side learning a known depletion law from telemetry pairs.

Ground truth moisture follows ``env_step`` under four rotating weather
settings; the service sees only telemetry records and recovers the four
law coefficients with its online normalized-LMS update.
"""

import numpy as np

from agrisim.sensors import EnvDynamics, EnvState, env_step
from agrisim.service import features_from_record, new_model, update_model
from agrisim.wire import TelemetryRecord

TRUE_W = (4e-6, 2e-6, 8e-6, 1.2e-5)
DYN = EnvDynamics(k_pump=0.002, k_rain=0.0, w=TRUE_W,
                  pressure_base_kpa=10.0, pressure_per_moisture_kpa=25.0)

# (temp_c, rh_pct, lux_raw): spread out so the four features are separable
SETTINGS = [(0.0, 90.0, 0), (2.0, 90.0, 0), (0.0, 40.0, 0), (0.0, 90.0, 1023)]


def record(ts_ms, setting, m_pct, pump=0):
    t_c, rh, lux_raw = setting
    return TelemetryRecord(node="demo", ts_ms=ts_ms, t_c=t_c, rh_pct=rh,
                           m_pct=m_pct, m_raw=512, rain=0, lux_raw=lux_raw,
                           p_kpa=20.0, f_mlmin=0.0, vol_ml=0.0, pump=pump)


# ``env_step`` is the oracle: spacing each pair so moisture falls exactly 1%
from agrisim.sensors import lux_estimate

rates = [float(np.dot(TRUE_W, features_from_record(record(0, s, 50)))) for s in SETTINGS]
for s, d in zip(SETTINGS, rates):
    env = EnvState(0.5, 0.0, 0.0, s[0], s[1], 22.5)
    stepped = env_step(env, DYN, 0.01 / d, False, 0.0, lux_estimate(s[2]))
    print(f"setting T={s[0]:4.1f} RH={s[1]:4.1f} lux_raw={s[2]:4d}: depletion {d:.2e}/s, "
          f"1% drop checks out: {env.moisture - stepped.moisture:.4f}")

model = new_model(learning_rate=0.05)
ts, m, idx = 0, 90, 0
prev = record(ts, SETTINGS[idx], m)
print("\nupdates   learned w (x 1e-6)                                max rel err")
while model.n_samples < 4000:
    if m <= 10:  # refill; the pump-on pair is training-masked
        ts += 1000
        refill = record(ts, SETTINGS[idx], m, pump=1)
        model = update_model(model, prev, refill)
        ts += 1000
        m = 90
        prev = record(ts, SETTINGS[idx], m)
        continue
    ts += round(0.01 / rates[idx] * 1000)
    m -= 1
    idx = (idx + 1) % 4
    cur = record(ts, SETTINGS[idx], m)
    model = update_model(model, prev, cur)
    prev = cur
    if model.n_samples in (10, 100, 500, 1000, 2000, 4000):
        rel = float((np.abs(model.w - np.array(TRUE_W)) / np.array(TRUE_W)).max())
        w_str = " ".join(f"{v * 1e6:8.3f}" for v in model.w)
        print(f"{model.n_samples:7d}   [{w_str}]   {rel:8.2%}")

print(f"\ntrue w (x 1e-6): [{' '.join(f'{v * 1e6:8.3f}' for v in TRUE_W)}]")
