"""Newline-delimited telemetry wire format.

One record per line: a flat JSON object with the schema version first,
then the record keys in a fixed order, numeric fields at fixed decimal
precision.  The same line format is the edge-to-cloud wire encoding, the
service's append-only persistence, and the element encoding inside API
responses -- a store can always be rebuilt by replaying a log file.

Record float fields are normalized to the wire precision on construction,
so ``parse_telemetry_line(serialize_record(r)) == r`` holds exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

WIRE_VERSION = 1

# key -> (kind, decimals). Kinds: str, int, bit, fixed (fixed-point float).
_SCHEMA: list[tuple[str, str, int]] = [
    ("node", "str", 0),
    ("ts_ms", "int", 0),
    ("t_c", "fixed", 1),
    ("rh_pct", "fixed", 1),
    ("m_pct", "int", 0),
    ("m_raw", "int", 0),
    ("rain", "bit", 0),
    ("lux_raw", "int", 0),
    ("p_kpa", "fixed", 2),
    ("f_mlmin", "fixed", 2),
    ("vol_ml", "fixed", 2),
    ("pump", "bit", 0),
]

RECORD_KEYS = tuple(key for key, _, _ in _SCHEMA)


class WireError(Exception):
    """Base for telemetry line parse failures."""


class UnknownVersion(WireError):
    def __init__(self, found):
        self.found = found
        super().__init__(f"unsupported wire version: {found!r}")


class MissingKey(WireError):
    def __init__(self, key: str):
        self.key = key
        super().__init__(f"missing key: {key}")


class FieldTypeError(WireError):
    def __init__(self, key: str, value):
        self.key = key
        self.value = value
        super().__init__(f"wrong type for {key}: {value!r}")


class UnexpectedKey(WireError):
    def __init__(self, key: str):
        self.key = key
        super().__init__(f"unexpected key: {key}")


@dataclass(frozen=True)
class TelemetryRecord:
    """One edge-node observation; float fields normalized to wire precision.

    ``dht_fault`` marks a tick where the humidity/temperature read failed
    and the last known values were reused.  It is node-local state, never
    serialized, and ignored by equality.
    """

    node: str
    ts_ms: int
    t_c: float
    rh_pct: float
    m_pct: int
    m_raw: int
    rain: int
    lux_raw: int
    p_kpa: float
    f_mlmin: float
    vol_ml: float
    pump: int
    dht_fault: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "t_c", round(float(self.t_c), 1))
        object.__setattr__(self, "rh_pct", round(float(self.rh_pct), 1))
        object.__setattr__(self, "p_kpa", round(float(self.p_kpa), 2))
        object.__setattr__(self, "f_mlmin", round(float(self.f_mlmin), 2))
        object.__setattr__(self, "vol_ml", round(float(self.vol_ml), 2))
        if self.ts_ms < 0:
            raise ValueError(f"ts_ms must be >= 0, got {self.ts_ms}")
        if not 0 <= self.m_pct <= 100:
            raise ValueError(f"m_pct must be in [0, 100], got {self.m_pct}")
        if not 0 <= self.m_raw <= 1023:
            raise ValueError(f"m_raw must be in [0, 1023], got {self.m_raw}")
        if not 0 <= self.lux_raw <= 1023:
            raise ValueError(f"lux_raw must be in [0, 1023], got {self.lux_raw}")
        if self.rain not in (0, 1):
            raise ValueError(f"rain must be 0 or 1, got {self.rain}")
        if self.pump not in (0, 1):
            raise ValueError(f"pump must be 0 or 1, got {self.pump}")
        if not 0.0 <= self.p_kpa <= 40.0:
            raise ValueError(f"p_kpa must be in [0, 40], got {self.p_kpa}")
        if self.f_mlmin < 0.0 or self.vol_ml < 0.0:
            raise ValueError("flow fields must be >= 0")


def serialize_record(rec: TelemetryRecord) -> str:
    """One canonical wire line (no trailing newline)."""
    parts = [f'"v":{WIRE_VERSION}']
    for key, kind, decimals in _SCHEMA:
        value = getattr(rec, key)
        if kind == "str":
            parts.append(f'"{key}":{json.dumps(value)}')
        elif kind == "fixed":
            parts.append(f'"{key}":{value:.{decimals}f}')
        else:
            parts.append(f'"{key}":{value}')
    return "{" + ",".join(parts) + "}"


def parse_telemetry_line(line: str) -> TelemetryRecord:
    """Parse and validate one wire line; errors name the first offending key."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise FieldTypeError("line", line.strip()) from exc
    if not isinstance(obj, dict):
        raise FieldTypeError("line", obj)
    if "v" not in obj:
        raise MissingKey("v")
    version = obj["v"]
    if isinstance(version, bool) or version != WIRE_VERSION:
        raise UnknownVersion(version)
    fields = {}
    for key, kind, _ in _SCHEMA:
        if key not in obj:
            raise MissingKey(key)
        value = obj[key]
        if isinstance(value, bool):
            raise FieldTypeError(key, value)
        if kind == "str":
            if not isinstance(value, str):
                raise FieldTypeError(key, value)
        elif kind == "fixed":
            if not isinstance(value, (int, float)):
                raise FieldTypeError(key, value)
            value = float(value)
        else:
            if not isinstance(value, int):
                raise FieldTypeError(key, value)
            if kind == "bit" and value not in (0, 1):
                raise FieldTypeError(key, value)
        fields[key] = value
    for key in obj:
        if key != "v" and key not in fields:
            raise UnexpectedKey(key)
    return TelemetryRecord(**fields)


def canonical_dumps(obj) -> str:
    """Compact JSON for API bodies that are not telemetry records."""
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)
