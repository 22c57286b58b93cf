"""Scenario and trace files: JSON Lines, one event/record per line.

A scenario drives a headless run. Events are sorted by time and must finish
with exactly one `end` event:

    {"format": "dice-scenario", "v": 1}
    {"t_ms": 0, "event": "rotate", "cube": "actuator", "top": "power_led"}
    {"t_ms": 100, "event": "stimulus", "sensor": "thermometer", "value": 50.0}
    {"t_ms": 5000, "event": "end"}

Traces are what a run writes: a `{"format": "dice-trace", "v": 1}` header,
then one record per actuation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, List, Optional, Tuple, Union

from .actuators import PeltierMode
from .model import (
    ActuationCommand,
    ActuatorKind,
    DiceError,
    Face,
    FanCommand,
    NoteOff,
    NoteOn,
    PeltierCommand,
    PowerLedCommand,
    RingGraphCommand,
    SensorKind,
    SoundCommand,
    VibrationCommand,
)
from .sensors import ConstantWave, SineWave, Waveform

SCENARIO_FORMAT = "dice-scenario"
TRACE_FORMAT = "dice-trace"
FORMAT_VERSION = 1


class ScenarioError(DiceError):
    """Scenario file rejected at load time."""


# --- events ------------------------------------------------------------------


@dataclass(frozen=True)
class StimulusEvent:
    t_ms: float
    sensor: SensorKind
    value: Optional[float] = None  # None = NoEcho (distance only)
    waveform: Optional[Waveform] = None  # microphone only


@dataclass(frozen=True)
class RotateEvent:
    t_ms: float
    cube: str  # "sensor" | "actuator"
    top: Union[Face, SensorKind, ActuatorKind]


@dataclass(frozen=True)
class SetLinkEvent:
    t_ms: float
    loss: Optional[float] = None
    latency_ms: Optional[float] = None
    jitter_ms: Optional[float] = None


@dataclass(frozen=True)
class SetMappingEvent:
    t_ms: float
    target: str  # "sensor:<kind>" or "actuator:<kind>"
    program: str


@dataclass(frozen=True)
class SetPeltierModeEvent:
    t_ms: float
    mode: PeltierMode


@dataclass(frozen=True)
class EndEvent:
    t_ms: float


ScenarioEvent = Union[
    StimulusEvent, RotateEvent, SetLinkEvent, SetMappingEvent, SetPeltierModeEvent, EndEvent
]


def _fail(lineno: int, msg: str) -> ScenarioError:
    return ScenarioError(f"line {lineno}: {msg}")


def _parse_waveform(obj: dict, lineno: int) -> Waveform:
    kind = obj.get("type")
    if kind == "constant":
        return ConstantWave(float(obj.get("level", 0.0)))
    if kind == "sine":
        return SineWave(
            freq_hz=float(obj.get("freq_hz", 440.0)),
            amplitude=float(obj.get("amplitude", 300.0)),
            dc=float(obj.get("dc", 512.0)),
        )
    raise _fail(lineno, f"unknown waveform type {kind!r} (expected constant or sine)")


def _parse_top(raw: str, lineno: int) -> Union[Face, SensorKind, ActuatorKind]:
    for enum_cls in (Face, SensorKind, ActuatorKind):
        try:
            return enum_cls(raw)
        except ValueError:
            continue
    raise _fail(lineno, f"unknown face or kind {raw!r}")


def parse_event(obj: dict, lineno: int) -> ScenarioEvent:
    if not isinstance(obj, dict):
        raise _fail(lineno, "event must be a JSON object")
    if "t_ms" not in obj:
        raise _fail(lineno, "missing t_ms")
    try:
        t_ms = float(obj["t_ms"])
    except (TypeError, ValueError):
        raise _fail(lineno, f"t_ms must be a number, got {obj['t_ms']!r}") from None
    if t_ms < 0:
        raise _fail(lineno, "t_ms must be non-negative")
    kind = obj.get("event")

    if kind == "stimulus":
        try:
            sensor = SensorKind(obj.get("sensor"))
        except ValueError:
            raise _fail(lineno, f"unknown sensor {obj.get('sensor')!r}") from None
        if "waveform" in obj:
            if sensor is not SensorKind.MICROPHONE:
                raise _fail(lineno, "waveform stimulus is only valid for the microphone")
            return StimulusEvent(t_ms, sensor, waveform=_parse_waveform(obj["waveform"], lineno))
        if "value" not in obj:
            raise _fail(lineno, "stimulus needs value or waveform")
        value = obj["value"]
        if value is None or value == "no_echo":
            if sensor is not SensorKind.DISTANCE:
                raise _fail(lineno, "only the distance sensor accepts no_echo")
            return StimulusEvent(t_ms, sensor, value=None)
        try:
            return StimulusEvent(t_ms, sensor, value=float(value))
        except (TypeError, ValueError):
            raise _fail(lineno, f"stimulus value must be a number, got {value!r}") from None

    if kind == "rotate":
        cube = obj.get("cube")
        if cube not in ("sensor", "actuator"):
            raise _fail(lineno, f"cube must be 'sensor' or 'actuator', got {cube!r}")
        top = obj.get("top")
        if not isinstance(top, str):
            raise _fail(lineno, "rotate needs a 'top' face or kind name")
        return RotateEvent(t_ms, cube, _parse_top(top, lineno))

    if kind == "set_link":
        loss = obj.get("loss")
        if loss is not None and not 0.0 <= float(loss) <= 1.0:
            raise _fail(lineno, f"loss must be in [0,1], got {loss}")
        for key in ("latency_ms", "jitter_ms"):
            if obj.get(key) is not None and float(obj[key]) < 0:
                raise _fail(lineno, f"{key} must be non-negative")
        return SetLinkEvent(
            t_ms,
            loss=None if loss is None else float(loss),
            latency_ms=None if obj.get("latency_ms") is None else float(obj["latency_ms"]),
            jitter_ms=None if obj.get("jitter_ms") is None else float(obj["jitter_ms"]),
        )

    if kind == "set_mapping":
        target = obj.get("target")
        program = obj.get("program")
        if not isinstance(target, str) or not isinstance(program, str):
            raise _fail(lineno, "set_mapping needs string 'target' and 'program'")
        return SetMappingEvent(t_ms, target, program)

    if kind == "set_peltier_mode":
        try:
            return SetPeltierModeEvent(t_ms, PeltierMode(obj.get("mode")))
        except ValueError:
            raise _fail(lineno, f"unknown peltier mode {obj.get('mode')!r}") from None

    if kind == "end":
        return EndEvent(t_ms)

    raise _fail(lineno, f"unknown event {kind!r}")


def parse_scenario(text: str) -> List[ScenarioEvent]:
    """Parse and validate scenario text (see module docstring for the format)."""
    events: List[ScenarioEvent] = []
    last_t = -1.0
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise _fail(lineno, f"invalid JSON: {exc.msg}") from None
        if isinstance(obj, dict) and "format" in obj:
            if lineno != 1 and events:
                raise _fail(lineno, "format header must be the first line")
            if obj.get("format") not in (SCENARIO_FORMAT, TRACE_FORMAT):
                raise _fail(lineno, f"unknown format {obj.get('format')!r}")
            if obj.get("v") != FORMAT_VERSION:
                raise _fail(lineno, f"unsupported format version {obj.get('v')!r}")
            continue
        event = parse_event(obj, lineno)
        if event.t_ms < last_t:
            raise _fail(lineno, f"events out of order: t_ms {event.t_ms:g} after {last_t:g}")
        last_t = event.t_ms
        if events and isinstance(events[-1], EndEvent):
            raise _fail(lineno, "no events allowed after end")
        events.append(event)
    if not events or not isinstance(events[-1], EndEvent):
        raise ScenarioError("scenario must finish with an end event")
    return events


def load_scenario(path: Union[str, Path]) -> List[ScenarioEvent]:
    text = Path(path).read_text(encoding="utf-8")
    return parse_scenario(text)


# --- trace -------------------------------------------------------------------


@dataclass(frozen=True)
class TraceRecord:
    t_ms: float
    active_sensor: SensorKind
    active_actuator: ActuatorKind
    value: int
    command: ActuationCommand
    link_sent: int
    link_delivered: int
    link_dropped: int
    stale: bool = False
    warnings: Tuple[str, ...] = ()


def command_to_json(cmd: ActuationCommand) -> dict:
    if isinstance(cmd, RingGraphCommand):
        return {
            "type": "ring_graph",
            "lit_count": cmd.lit_count,
            "color": list(cmd.color),
            "per_pixel_brightness": cmd.per_pixel_brightness,
        }
    if isinstance(cmd, PowerLedCommand):
        return {"type": "power_led", "brightness": cmd.brightness}
    if isinstance(cmd, SoundCommand):
        events = []
        for e in cmd.events:
            if isinstance(e, NoteOn):
                events.append({"type": "note_on", "note": e.note, "velocity": e.velocity})
            else:
                events.append({"type": "note_off", "note": e.note})
        return {"type": "sound", "events": events}
    if isinstance(cmd, PeltierCommand):
        return {"type": "peltier", "pwm": cmd.pwm}
    if isinstance(cmd, VibrationCommand):
        return {"type": "vibration", "pwm": cmd.pwm}
    if isinstance(cmd, FanCommand):
        return {"type": "fan", "pwm": cmd.pwm}
    raise TypeError(f"unknown command {cmd!r}")


def record_to_json(rec: TraceRecord) -> dict:
    obj = {
        "t_ms": round(rec.t_ms, 3),
        "active_sensor": rec.active_sensor.value,
        "active_actuator": rec.active_actuator.value,
        "value": rec.value,
        "command": command_to_json(rec.command),
        "link": {"sent": rec.link_sent, "delivered": rec.link_delivered, "dropped": rec.link_dropped},
    }
    if rec.stale:
        obj["stale"] = True
    if rec.warnings:
        obj["warnings"] = list(rec.warnings)
    return obj


def write_trace(records: List[TraceRecord], out: IO[str]) -> None:
    out.write(json.dumps({"format": TRACE_FORMAT, "v": FORMAT_VERSION}) + "\n")
    for rec in records:
        out.write(json.dumps(record_to_json(rec), separators=(",", ":")) + "\n")


def trace_text(records: List[TraceRecord]) -> str:
    import io

    buf = io.StringIO()
    write_trace(records, buf)
    return buf.getvalue()
