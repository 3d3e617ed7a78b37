#!/usr/bin/env python3
"""Power-supply arithmetic: the classic 115 V chain and the 78xx headroom rule."""

from agrisim.power import (
    PowerChainSpec,
    REGULATOR_CODES,
    chain_report,
    regulator_check,
    regulator_output_v,
)

print(chain_report(PowerChainSpec(line_v=115.0, turns_ratio=3.0, regulator_code=7805)))

print("headroom boundaries for the whole 78xx family:")
for code in REGULATOR_CODES:
    v_out = regulator_output_v(code)
    edge = regulator_check(v_out + 3.0, code)
    below = regulator_check(v_out + 2.9, code)
    print(f"  {code}: {v_out:4.0f} V out, ok from {edge.min_v_in:4.1f} V "
          f"(at {v_out + 2.9:.1f} V: {'ok' if below.ok else 'insufficient'})")

print("\na 9 V wall wart feeding a 7805:", "fine" if regulator_check(9.0, 7805).ok else "no")
print("the same wart feeding a 7808  :", "fine" if regulator_check(9.0, 7808).ok else "too little headroom")
