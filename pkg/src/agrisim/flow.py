"""Hall-effect flow meter arithmetic (YFS201-style, 2.25 mL per pulse).

Forward direction: pulse counts to volume and to a mL/min rate.  Inverse
direction, for simulation: a commanded flow rate becomes a deterministic
pulse train, with the fractional pulse left over carried in an explicit
accumulator so delivered volume is conserved exactly across steps.

The real part is not precise; an optional uniform multiplicative noise
(off by default) models that, fed by a caller-supplied RNG.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from random import Random


@dataclass(frozen=True)
class FlowCalib:
    """Pulse-to-volume calibration plus optional rate noise fraction."""

    ml_per_pulse: float = 2.25
    noise_frac: float = 0.0

    def __post_init__(self):
        if self.ml_per_pulse <= 0.0:
            raise ValueError(f"ml_per_pulse must be > 0, got {self.ml_per_pulse}")
        if not 0.0 <= self.noise_frac < 1.0:
            raise ValueError(f"noise_frac must be in [0, 1), got {self.noise_frac}")


@dataclass(frozen=True)
class FlowSample:
    """One measurement window: raw count, derived rate, running volume."""

    pulse_count: int
    window_s: float
    rate_ml_per_min: float
    cumulative_ml: float


@dataclass(frozen=True)
class PulseAccumulator:
    """Fractional pulse volume carried between simulation steps."""

    residual_ml: float = 0.0


def pulses_to_volume(count: int, c: FlowCalib = FlowCalib()) -> float:
    """Delivered volume in mL for *count* pulses."""
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    return count * c.ml_per_pulse


def flow_rate(count: int, window_s: float, c: FlowCalib = FlowCalib()) -> float:
    """Rate in mL/min from pulses counted over *window_s* seconds."""
    if window_s <= 0.0:
        raise ValueError(f"window_s must be > 0, got {window_s}")
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    return count * c.ml_per_pulse * 60.0 / window_s


def flow_to_pulses(
    rate_ml_per_min: float,
    dt_s: float,
    acc: PulseAccumulator = PulseAccumulator(),
    c: FlowCalib = FlowCalib(),
    rng: Random | None = None,
) -> tuple[int, PulseAccumulator]:
    """Pulses emitted over *dt_s* at the commanded rate, carrying the remainder.

    Volume is conserved exactly: over any run, emitted pulses times the
    pulse volume plus the final residual equals the total delivered volume.
    With ``noise_frac`` set and an RNG given, the effective rate of each
    step is scaled by a uniform factor in [1 - noise, 1 + noise].
    """
    if rate_ml_per_min < 0.0:
        raise ValueError(f"rate must be >= 0, got {rate_ml_per_min}")
    if dt_s <= 0.0:
        raise ValueError(f"dt_s must be > 0, got {dt_s}")
    rate = rate_ml_per_min
    if c.noise_frac > 0.0 and rng is not None and rate > 0.0:
        rate *= 1.0 + rng.uniform(-c.noise_frac, c.noise_frac)
    total_ml = acc.residual_ml + rate * dt_s / 60.0
    pulses = math.floor(total_ml / c.ml_per_pulse)
    residual = total_ml - pulses * c.ml_per_pulse
    if residual >= c.ml_per_pulse:  # float guard
        pulses += 1
        residual -= c.ml_per_pulse
    return pulses, PulseAccumulator(residual_ml=max(residual, 0.0))
