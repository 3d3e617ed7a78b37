"""Synthetic telemetry stream with a known depletion law, for learning tests.

Four rotating environment settings give linearly independent feature
vectors (computed through the service's own feature map, so recovery is
judged against exactly what the learner sees).  Each record pair drops
soil moisture by exactly one integer percent; the pair spacing is chosen
from the true law so the observed rate equals w_true . x.  Between sweeps
a pump-on refill pair resets moisture; those pairs are training-masked.

Optional multiplicative observation noise perturbs the pair spacing,
which scales the observed rate by the same factor.
"""

from __future__ import annotations

import random

import numpy as np

from agrisim.service import features_from_record
from agrisim.wire import TelemetryRecord

# (t_c, rh_pct, lux_raw) per setting; chosen for a well-conditioned basis.
SETTINGS = [
    (0.0, 90.0, 0),
    (2.0, 90.0, 0),
    (0.0, 40.0, 0),
    (0.0, 90.0, 1023),
]

W_TRUE = np.array([4e-6, 2e-6, 8e-6, 1.2e-5])


def _record(node, ts_ms, setting, m_pct, pump=0):
    t_c, rh, lux_raw = setting
    return TelemetryRecord(
        node=node, ts_ms=ts_ms, t_c=t_c, rh_pct=rh, m_pct=m_pct, m_raw=512,
        rain=0, lux_raw=lux_raw, p_kpa=20.0, f_mlmin=0.0, vol_ml=0.0, pump=pump,
    )


def setting_features() -> list[np.ndarray]:
    return [features_from_record(_record("n", 0, s, 50)) for s in SETTINGS]


def true_rates() -> list[float]:
    return [float(W_TRUE @ x) for x in setting_features()]


def make_depletion_stream(
    n_updates: int, noise_frac: float = 0.0, seed: int = 0, node: str = "synth"
) -> list[TelemetryRecord]:
    """Records whose unmasked consecutive pairs yield *n_updates* training steps."""
    rng = random.Random(seed)
    rates = true_rates()
    records = []
    ts_ms = 0
    m = 90
    k = 0
    prev_idx = 0
    records.append(_record(node, ts_ms, SETTINGS[prev_idx], m))
    while k < n_updates:
        if m <= 10:
            # pump-on refill pair; both surrounding update pairs are masked
            ts_ms += 1000
            records.append(_record(node, ts_ms, SETTINGS[prev_idx], m, pump=1))
            m = 90
            prev_idx = (prev_idx + 1) % 4
            ts_ms += 1000
            records.append(_record(node, ts_ms, SETTINGS[prev_idx], m))
            continue
        d = rates[prev_idx]  # the previous record's features govern the interval
        dt_ms = round(0.01 / d * 1000.0)
        if noise_frac:
            dt_ms = max(1, round(dt_ms / (1.0 + rng.uniform(-noise_frac, noise_frac))))
        ts_ms += dt_ms
        m -= 1
        prev_idx = (prev_idx + 1) % 4
        records.append(_record(node, ts_ms, SETTINGS[prev_idx], m))
        k += 1
    return records
