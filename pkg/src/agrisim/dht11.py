"""Bit-exact single-wire codec for the DHT11 humidity/temperature sensor.

A reading is five bytes on the wire: humidity integer, humidity tenths,
temperature integer, temperature tenths, and a checksum (byte sum mod
256).  The sensor answers a host start pulse with a LOW/HIGH response
pair, then sends 40 bits MSB-first -- each bit a fixed LOW preamble
followed by a HIGH whose duration carries the value -- and closes the
frame with one final LOW.

The decoder classifies bit highs against a duration threshold, refuses
highs inside a small guard band around it rather than guessing, and never
returns a frame whose checksum fails.  Frames are plain ``bytes`` of
length 5; waveforms are sequences of :class:`LineSegment`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

LOW = "L"
HIGH = "H"

# Half-width of the refuse-to-guess band around the 0/1 duration threshold.
AMBIGUITY_GUARD_US = 2.0

# A leading LOW at least this long is read as an attempted host start pulse
# (and must then satisfy the 18 ms minimum); anything shorter that misses
# the response tolerance is just a malformed response.
HOST_PULSE_CANDIDATE_US = 1_000.0

RH_INT_MIN, RH_INT_MAX = 20, 90
T_INT_MIN, T_INT_MAX = 0, 50


class Dht11Error(Exception):
    """Base for all codec failures."""


class RangeError(Dht11Error):
    """A reading field is outside the sensor's measurable range."""

    def __init__(self, field: str, value):
        self.field = field
        self.value = value
        super().__init__(f"{field} out of range: {value}")


class FrameSizeError(Dht11Error):
    def __init__(self, length: int):
        self.length = length
        super().__init__(f"frame must be exactly 5 octets, got {length}")


class ChecksumError(Dht11Error):
    def __init__(self, expected: int, found: int):
        self.expected = expected
        self.found = found
        super().__init__(f"checksum mismatch: expected {expected}, found {found}")


class NoResponse(Dht11Error):
    """Leading LOW/HIGH response pair missing or outside tolerance."""


class BitCountError(Dht11Error):
    def __init__(self, count: int):
        self.count = count
        super().__init__(f"expected exactly 40 bit cells, got {count}")


class AmbiguousDuration(Dht11Error):
    def __init__(self, duration_us: float):
        self.duration_us = duration_us
        super().__init__(f"bit HIGH of {duration_us} us is too close to the 0/1 threshold")


class StartPulseTooShort(Dht11Error):
    def __init__(self, duration_us: float):
        self.duration_us = duration_us
        super().__init__(f"host start pulse of {duration_us} us is shorter than 18000 us")


@dataclass(frozen=True)
class Dht11Timing:
    """Wire timings in microseconds plus the decoder's tolerance."""

    start_low_min_us: float = 18_000.0
    resp_low_us: float = 54.0
    resp_high_us: float = 80.0
    bit_preamble_low_us: float = 50.0
    bit0_high_us: float = 26.0
    bit1_high_us: float = 70.0
    eof_low_us: float = 54.0
    classify_threshold_us: float = 50.0
    tolerance_frac: float = 0.20

    def __post_init__(self):
        if not self.bit0_high_us < self.classify_threshold_us < self.bit1_high_us:
            raise ValueError("need bit0_high < classify_threshold < bit1_high")
        if not 0.0 <= self.tolerance_frac <= 0.3:
            raise ValueError(f"tolerance_frac must be in [0, 0.3], got {self.tolerance_frac}")


DEFAULT_TIMING = Dht11Timing()


@dataclass(frozen=True)
class LineSegment:
    """One held level on the data line."""

    level: str
    duration_us: float

    def __post_init__(self):
        if self.level not in (LOW, HIGH):
            raise ValueError(f"level must be {LOW!r} or {HIGH!r}, got {self.level!r}")
        if self.duration_us <= 0.0:
            raise ValueError(f"duration_us must be > 0, got {self.duration_us}")


@dataclass(frozen=True)
class Dht11Reading:
    """Humidity and temperature split into integer and tenths bytes."""

    rh_int: int
    rh_frac: int
    t_int: int
    t_frac: int

    @property
    def rh(self) -> float:
        return self.rh_int + self.rh_frac / 10.0

    @property
    def temp_c(self) -> float:
        return self.t_int + self.t_frac / 10.0

    def validate(self) -> None:
        if not RH_INT_MIN <= self.rh_int <= RH_INT_MAX:
            raise RangeError("rh_int", self.rh_int)
        if not 0 <= self.rh_frac <= 9:
            raise RangeError("rh_frac", self.rh_frac)
        if not T_INT_MIN <= self.t_int <= T_INT_MAX:
            raise RangeError("t_int", self.t_int)
        if not 0 <= self.t_frac <= 9:
            raise RangeError("t_frac", self.t_frac)


def checksum_of(payload: Sequence[int]) -> int:
    """Low 8 bits of the payload byte sum."""
    return sum(payload[:4]) % 256


def verify_checksum(frame: Sequence[int]) -> None:
    """Raise FrameSizeError / ChecksumError unless the frame is consistent."""
    if len(frame) != 5:
        raise FrameSizeError(len(frame))
    expected = checksum_of(frame)
    if frame[4] != expected:
        raise ChecksumError(expected, frame[4])


def encode_reading(r: Dht11Reading) -> bytes:
    """Pack a validated reading into the 5-byte frame."""
    r.validate()
    payload = (r.rh_int, r.rh_frac, r.t_int, r.t_frac)
    return bytes(payload) + bytes([sum(payload) % 256])


def frame_to_reading(frame: Sequence[int]) -> Dht11Reading:
    """Unpack a frame, verifying checksum and the measurable ranges."""
    verify_checksum(frame)
    reading = Dht11Reading(frame[0], frame[1], frame[2], frame[3])
    reading.validate()
    return reading


def frame_to_waveform(frame: Sequence[int], t: Dht11Timing = DEFAULT_TIMING) -> list[LineSegment]:
    """Emit the sensor's reply: response pair, 40 bit cells MSB-first, EOF low.

    Always 83 segments, alternating and starting LOW.  Refuses frames with
    a bad checksum so an inconsistent waveform can never be produced.
    """
    verify_checksum(frame)
    segs = [LineSegment(LOW, t.resp_low_us), LineSegment(HIGH, t.resp_high_us)]
    for byte in frame:
        for bit_pos in range(7, -1, -1):
            bit = (byte >> bit_pos) & 1
            segs.append(LineSegment(LOW, t.bit_preamble_low_us))
            segs.append(LineSegment(HIGH, t.bit1_high_us if bit else t.bit0_high_us))
    segs.append(LineSegment(LOW, t.eof_low_us))
    return segs


def _within(duration: float, nominal: float, tol: float) -> bool:
    return abs(duration - nominal) <= tol * nominal


def decode_waveform(segs: Sequence[LineSegment], t: Dht11Timing = DEFAULT_TIMING) -> bytes:
    """Recover the 5-byte frame from a timed waveform.

    Accepts an optional leading host start pulse (its LOW plus the release
    HIGH) ahead of the response; the host LOW must be at least 18 ms.
    Classification looks only at each bit cell's HIGH duration: below the
    threshold is 0, at or above is 1, and anything within the guard band
    is refused as ambiguous.  The checksum is verified before returning,
    so a corrupted frame surfaces as an error, never as data.
    """
    segs = list(segs)
    for a, b in zip(segs, segs[1:]):
        if a.level == b.level:
            raise ValueError("waveform segments must alternate level")

    i = 0
    if segs and segs[0].level == LOW and segs[0].duration_us >= HOST_PULSE_CANDIDATE_US:
        # Leading host start pulse plus its release HIGH.
        if segs[0].duration_us < t.start_low_min_us:
            raise StartPulseTooShort(segs[0].duration_us)
        i = 2

    if len(segs) - i < 2:
        raise NoResponse("waveform too short for a response pair")
    lo, hi = segs[i], segs[i + 1]
    if lo.level != LOW or not _within(lo.duration_us, t.resp_low_us, t.tolerance_frac):
        raise NoResponse(f"response LOW outside tolerance: {lo.level} {lo.duration_us} us")
    if hi.level != HIGH or not _within(hi.duration_us, t.resp_high_us, t.tolerance_frac):
        raise NoResponse(f"response HIGH outside tolerance: {hi.level} {hi.duration_us} us")

    rest = segs[i + 2 :]
    # A complete body is 40 (LOW, HIGH) cells plus the trailing EOF LOW.
    if len(rest) % 2 == 0:
        raise BitCountError(len(rest) // 2)
    n_cells = (len(rest) - 1) // 2
    if n_cells != 40:
        raise BitCountError(n_cells)

    bits = []
    for cell in range(40):
        high = rest[2 * cell + 1]
        if abs(high.duration_us - t.classify_threshold_us) <= AMBIGUITY_GUARD_US:
            raise AmbiguousDuration(high.duration_us)
        bits.append(1 if high.duration_us >= t.classify_threshold_us else 0)

    frame = bytearray(5)
    for idx in range(5):
        value = 0
        for bit in bits[8 * idx : 8 * idx + 8]:
            value = (value << 1) | bit
        frame[idx] = value
    verify_checksum(frame)
    return bytes(frame)


def dump_waveform(segs: Iterable[LineSegment]) -> str:
    """Serialize a waveform, one ``H <us>`` / ``L <us>`` line per segment."""
    lines = []
    for seg in segs:
        d = seg.duration_us
        text = str(int(d)) if float(d).is_integer() else repr(float(d))
        lines.append(f"{seg.level} {text}\n")
    return "".join(lines)


def load_waveform(text: str) -> list[LineSegment]:
    """Parse the dump format back into segments (bit-exact with dump_waveform)."""
    segs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2 or parts[0] not in (LOW, HIGH):
            raise ValueError(f"bad waveform line {lineno}: {line!r}")
        segs.append(LineSegment(parts[0], float(parts[1])))
    return segs
