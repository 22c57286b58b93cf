#!/usr/bin/env python3
"""Regenerate scenarios/sweep_36.jsonl: every sensor paired with every actuator.

Each pair holds the top faces for 100 ms (two samples at the 50 ms default
period). Stimuli are fixed up front at mid-scale-ish values so every pair
produces a non-trivial command.
"""

import json
from pathlib import Path

SENSORS = ["potentiometer", "thermometer", "microphone", "distance", "pir", "light"]
ACTUATORS = ["ring_graph", "power_led", "sound", "peltier", "vibration", "fan"]

PAIR_MS = 100
BLOCK_MS = PAIR_MS * len(ACTUATORS)

STIMULI = [
    {"sensor": "potentiometer", "value": 135.0},
    {"sensor": "thermometer", "value": 25.0},
    {"sensor": "microphone", "waveform": {"type": "sine", "freq_hz": 100.0, "amplitude": 300.0, "dc": 500.0}},
    {"sensor": "distance", "value": 36.0},
    {"sensor": "pir", "value": 1},
    {"sensor": "light", "value": 16384.0},
]


def main() -> None:
    lines = [{"format": "dice-scenario", "v": 1}]
    for stim in STIMULI:
        lines.append({"t_ms": 0, "event": "stimulus", **stim})
    for i, sensor in enumerate(SENSORS):
        lines.append({"t_ms": i * BLOCK_MS, "event": "rotate", "cube": "sensor", "top": sensor})
        for j, actuator in enumerate(ACTUATORS):
            lines.append(
                {"t_ms": i * BLOCK_MS + j * PAIR_MS, "event": "rotate", "cube": "actuator", "top": actuator}
            )
    lines.append({"t_ms": len(SENSORS) * BLOCK_MS, "event": "end"})
    out = Path(__file__).resolve().parent.parent / "scenarios" / "sweep_36.jsonl"
    out.write_text("".join(json.dumps(line) + "\n" for line in lines), encoding="utf-8")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
