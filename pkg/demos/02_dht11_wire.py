#!/usr/bin/env python3
"""One humidity/temperature reading on the single-wire bus, end to end.

Encodes a reading into its 5-byte frame, shows the first segments of the
waveform and the dump-file format, then decodes a jittered copy.
"""

from agrisim import dht11

reading = dht11.Dht11Reading(rh_int=65, rh_frac=5, t_int=27, t_frac=2)
frame = dht11.encode_reading(reading)
print(f"reading  : RH {reading.rh}%  T {reading.temp_c}C")
print(f"frame    : {list(frame)}  (checksum {frame[4]} = sum of payload mod 256)")

segs = dht11.frame_to_waveform(frame)
print(f"waveform : {len(segs)} segments; response pair then 40 bit cells then EOF")
print("first ten segments:")
for seg in segs[:10]:
    print(f"   {seg.level} {seg.duration_us:5.1f} us")

print("\ndump format (first four lines):")
print("".join(dump_line + "\n" for dump_line in dht11.dump_waveform(segs).splitlines()[:4]))

# a lazy oscillator: every duration stretched 12%
stretched = [dht11.LineSegment(s.level, s.duration_us * 1.12) for s in segs]
decoded = dht11.decode_waveform(stretched)
print(f"decoded under 12% jitter: {list(decoded)} -> {dht11.frame_to_reading(decoded)}")

# corruption does not pass: flip one bit cell's duration class
broken = list(segs)
broken[3] = dht11.LineSegment(dht11.HIGH, 70.0)  # bit 0 of byte 0 now reads 1
try:
    dht11.decode_waveform(broken)
except dht11.ChecksumError as err:
    print(f"one flipped bit -> {err}")
