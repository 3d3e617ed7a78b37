"""Deterministic desk-scale smart irrigation stack.

Sensor physics (``sensors``), the DHT11 single-wire codec (``dht11``),
flow-meter arithmetic (``flow``), the rain-gated edge controller and
scenario runner (``controller``), the telemetry wire format (``wire``),
the learning decision service (``service``, ``server``), power-supply
chain math (``power``), and the ``agrisim`` CLI (``cli``).
"""

from .controller import (
    EdgeConfig,
    IrrigationPolicy,
    LightProfile,
    PumpCommand,
    PumpState,
    ScenarioConfig,
    decide_pump,
    format_lcd,
    run_scenario,
    step_node,
)
from .dht11 import (
    Dht11Reading,
    Dht11Timing,
    LineSegment,
    decode_waveform,
    encode_reading,
    frame_to_reading,
    frame_to_waveform,
    verify_checksum,
)
from .flow import FlowCalib, PulseAccumulator, flow_rate, flow_to_pulses, pulses_to_volume
from .sensors import (
    AdcSpec,
    EnvDynamics,
    EnvState,
    LdrParams,
    PressureSpec,
    RainBoardModel,
    adc_quantize,
    divider_voltage,
    env_step,
    ldr_resistance,
    pressure_counts,
    rain_signals,
    soil_moisture_voltage,
)
from .service import (
    DecisionService,
    ModelCoefficients,
    TelemetryStore,
    recommend_policy,
    update_model,
)
from .wire import TelemetryRecord, parse_telemetry_line, serialize_record

__version__ = "0.1.0"
