"""Simulator configuration: face assignments, palette, timing, output tuning.

Plain `key = value` text, UTF-8. Lines starting with '#' are comments; a '#'
inside a value is kept, so hex colors work. Unknown keys are rejected so
typos surface early. Example:

    sensor_face.pos_z = pir
    actuator_face.pos_z = vibration
    palette.thermometer = #FF0000
    sampling_period_ms.light = 100
    peltier_mode = heat_only
    ring_pixel_brightness = 64
    midi_velocity = 100
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Union

from .actuators import DEFAULT_PALETTE, MIDI_VELOCITY, RING_PIXEL_BRIGHTNESS, PeltierMode
from .model import RGB, ActuatorKind, DiceError, Face, FaceAssignment, SensorKind
from .sensors import DEFAULT_SAMPLING_PERIOD_MS


class ConfigError(DiceError):
    pass


DEFAULT_SENSOR_FACES: Dict[Face, SensorKind] = {
    Face.POS_X: SensorKind.POTENTIOMETER,
    Face.NEG_X: SensorKind.THERMOMETER,
    Face.POS_Y: SensorKind.MICROPHONE,
    Face.NEG_Y: SensorKind.DISTANCE,
    Face.POS_Z: SensorKind.PIR,
    Face.NEG_Z: SensorKind.LIGHT,
}

DEFAULT_ACTUATOR_FACES: Dict[Face, ActuatorKind] = {
    Face.POS_X: ActuatorKind.RING_GRAPH,
    Face.NEG_X: ActuatorKind.POWER_LED,
    Face.POS_Y: ActuatorKind.SOUND,
    Face.NEG_Y: ActuatorKind.PELTIER,
    Face.POS_Z: ActuatorKind.VIBRATION,
    Face.NEG_Z: ActuatorKind.FAN,
}


@dataclass
class SimConfig:
    sensor_faces: Dict[Face, SensorKind] = field(default_factory=lambda: dict(DEFAULT_SENSOR_FACES))
    actuator_faces: Dict[Face, ActuatorKind] = field(default_factory=lambda: dict(DEFAULT_ACTUATOR_FACES))
    palette: Dict[SensorKind, RGB] = field(default_factory=lambda: dict(DEFAULT_PALETTE))
    sampling_period_ms: Dict[SensorKind, float] = field(
        default_factory=lambda: {k: DEFAULT_SAMPLING_PERIOD_MS for k in SensorKind}
    )
    peltier_mode: PeltierMode = PeltierMode.BIPOLAR
    ring_pixel_brightness: int = RING_PIXEL_BRIGHTNESS
    midi_velocity: int = MIDI_VELOCITY

    def sensor_assignment(self) -> FaceAssignment:
        return FaceAssignment(self.sensor_faces)

    def actuator_assignment(self) -> FaceAssignment:
        return FaceAssignment(self.actuator_faces)


def _parse_color(text: str, where: str) -> RGB:
    text = text.strip()
    if text.startswith("#"):
        hexpart = text[1:]
        if len(hexpart) != 6:
            raise ConfigError(f"{where}: color must be #RRGGBB, got {text!r}")
        try:
            return (int(hexpart[0:2], 16), int(hexpart[2:4], 16), int(hexpart[4:6], 16))
        except ValueError:
            raise ConfigError(f"{where}: color must be #RRGGBB, got {text!r}") from None
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"{where}: color must be #RRGGBB or r,g,b, got {text!r}")
    try:
        rgb = tuple(int(p) for p in parts)
    except ValueError:
        raise ConfigError(f"{where}: color components must be integers, got {text!r}") from None
    if any(not 0 <= c <= 255 for c in rgb):
        raise ConfigError(f"{where}: color components must be 0..255, got {text!r}")
    return rgb  # type: ignore[return-value]


def _enum_value(enum_cls, text: str, where: str):
    try:
        return enum_cls(text.strip().lower())
    except ValueError:
        valid = ", ".join(e.value for e in enum_cls)
        raise ConfigError(f"{where}: expected one of {valid}, got {text!r}") from None


def parse_config(text: str) -> SimConfig:
    cfg = SimConfig()
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw_line.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        where = f"line {lineno} ({key})"
        try:
            _apply_key(cfg, key, value, where)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from None
    _validate(cfg)
    return cfg


def _apply_key(cfg: SimConfig, key: str, value: str, where: str) -> None:
    if key.startswith("sensor_face."):
        face = _enum_value(Face, key.split(".", 1)[1], where)
        cfg.sensor_faces[face] = _enum_value(SensorKind, value, where)
    elif key.startswith("actuator_face."):
        face = _enum_value(Face, key.split(".", 1)[1], where)
        cfg.actuator_faces[face] = _enum_value(ActuatorKind, value, where)
    elif key.startswith("palette."):
        sensor = _enum_value(SensorKind, key.split(".", 1)[1], where)
        cfg.palette[sensor] = _parse_color(value, where)
    elif key.startswith("sampling_period_ms."):
        sensor = _enum_value(SensorKind, key.split(".", 1)[1], where)
        period = float(value)
        if period <= 0:
            raise ConfigError(f"{where}: sampling period must be positive")
        cfg.sampling_period_ms[sensor] = period
    elif key == "peltier_mode":
        cfg.peltier_mode = _enum_value(PeltierMode, value, where)
    elif key == "ring_pixel_brightness":
        b = int(value)
        if not 0 <= b <= 255:
            raise ConfigError(f"{where}: brightness must be 0..255")
        cfg.ring_pixel_brightness = b
    elif key == "midi_velocity":
        v = int(value)
        if not 0 <= v <= 127:
            raise ConfigError(f"{where}: velocity must be 0..127")
        cfg.midi_velocity = v
    else:
        raise ConfigError(f"{where}: unknown key")


def _validate(cfg: SimConfig) -> None:
    try:
        cfg.sensor_assignment()
        cfg.actuator_assignment()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if len(set(cfg.palette.values())) != 6:
        raise ConfigError("palette colors must be distinct per sensor")


def load_config(path: Union[str, Path, None]) -> SimConfig:
    """Load a config file; None returns defaults."""
    if path is None:
        return SimConfig()
    text = Path(path).read_text(encoding="utf-8")
    return parse_config(text)
