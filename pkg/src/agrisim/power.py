"""Power-supply chain arithmetic: transformer, rectifier, 78xx regulator.

Reproduces the classic worked chain verbatim: line voltage times the turn
ratio is reported as peak-to-peak (the source mixes RMS in, and we keep
its arithmetic rather than correcting the units), the half-wave rectifier
halves it, and a 78xx regulator needs its input at least 3 V above the
output voltage spelled by the last digits of the chip code.

The filter stage is descriptive only (no formula is modeled); for the
115 V x 3 chain the typical filtered level is about 110 V dc with ripple.
Current limits (100 mA stock, 150 mA typical, 1 A with a heat sink on a
7805) are documentation, not modeled behavior.
"""

from __future__ import annotations

from dataclasses import dataclass

HEADROOM_V = 3.0
FILTERED_EXAMPLE_V = 110.0

REGULATOR_CODES = (7805, 7806, 7808, 7809, 7810, 7812, 7815, 7818, 7824)


class UnknownRegulator(ValueError):
    def __init__(self, code):
        self.code = code
        super().__init__(f"unknown 78xx regulator code: {code}")


@dataclass(frozen=True)
class PowerChainSpec:
    line_v: float
    turns_ratio: float
    regulator_code: int
    headroom_v: float = HEADROOM_V
    output_current_ma: float = 100.0

    def __post_init__(self):
        if self.line_v <= 0.0:
            raise ValueError(f"line_v must be > 0, got {self.line_v}")
        if self.turns_ratio <= 0.0:
            raise ValueError(f"turns_ratio must be > 0, got {self.turns_ratio}")
        if self.headroom_v != HEADROOM_V:
            raise ValueError("headroom_v is fixed at 3")
        if self.regulator_code not in REGULATOR_CODES:
            raise UnknownRegulator(self.regulator_code)


@dataclass(frozen=True)
class RegulatorCheck:
    ok: bool
    v_out: float
    v_in: float
    min_v_in: float


def transformer_output_pp(line_v: float, ratio: float) -> float:
    """Secondary output, reported peak-to-peak as line voltage times ratio."""
    if line_v <= 0.0:
        raise ValueError(f"line_v must be > 0, got {line_v}")
    if ratio <= 0.0:
        raise ValueError(f"ratio must be > 0, got {ratio}")
    return line_v * ratio


def rectifier_output(v_pp: float) -> float:
    """Half-wave rectifier: pulsing DC at half the peak-to-peak input."""
    if v_pp <= 0.0:
        raise ValueError(f"v_pp must be > 0, got {v_pp}")
    return v_pp / 2.0


def regulator_output_v(code: int) -> float:
    """Output voltage spelled by the last digits of the 78xx chip code."""
    if code not in REGULATOR_CODES:
        raise UnknownRegulator(code)
    return float(code % 100)


def regulator_check(v_in: float, code: int) -> RegulatorCheck:
    """Check the 3 V headroom rule: ok iff v_in >= v_out + 3."""
    v_out = regulator_output_v(code)
    min_v_in = v_out + HEADROOM_V
    return RegulatorCheck(ok=v_in >= min_v_in, v_out=v_out, v_in=v_in, min_v_in=min_v_in)


def chain_report(spec: PowerChainSpec) -> str:
    """Human-readable report for the full chain, one stage per line."""
    v_pp = transformer_output_pp(spec.line_v, spec.turns_ratio)
    v_rect = rectifier_output(v_pp)
    check = regulator_check(v_rect, spec.regulator_code)
    status = "ok" if check.ok else f"insufficient headroom (needs >= {check.min_v_in:.1f} V)"
    return (
        f"transformer : {spec.line_v:g} V AC x {spec.turns_ratio:g} = {v_pp:.1f} V p-p\n"
        f"rectifier   : {v_rect:.1f} V pulsing DC\n"
        f"filter      : not computed (typical smoothed level ~{FILTERED_EXAMPLE_V:.0f} V dc"
        f" with ripple for the 345 V p-p chain)\n"
        f"regulator   : {spec.regulator_code} -> {check.v_out:.0f} V, input {check.v_in:.1f} V:"
        f" {status}\n"
    )
