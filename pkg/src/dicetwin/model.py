"""Shared domain vocabulary for the dice pair.

Two cubes: one carries six sensors, the other six actuators, one per face.
The upward face selects which sensor/actuator is live. Every sensor reading
is reduced to a single integer 0..24 before it crosses the wire.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional, Tuple, Union

#: Inclusive upper bound of the normalized intermediate value.
VALUE_MAX = 24

#: Dot-product margin a challenger face must win by before the active face
#: switches. Prevents flapping when the cube rests near an edge.
FACE_HYSTERESIS = 0.05


class DiceError(Exception):
    """Base class for all errors raised by this package."""


class InvalidOrientation(DiceError):
    """Orientation vector is not unit-length (or not finite)."""


class HumanSense(str, Enum):
    SIGHT = "sight"
    HEARING = "hearing"
    TOUCH = "touch"
    TEMPERATURE = "temperature"


class SensorKind(str, Enum):
    """The six sensors, one per face of the sensor cube."""

    POTENTIOMETER = "potentiometer"
    THERMOMETER = "thermometer"
    MICROPHONE = "microphone"
    DISTANCE = "distance"
    PIR = "pir"
    LIGHT = "light"

    @property
    def wire_id(self) -> int:
        return _SENSOR_WIRE_IDS[self]

    @property
    def human_sense(self) -> HumanSense:
        return _SENSOR_SENSES[self]

    @property
    def raw_domain(self) -> "RawDomain":
        return _SENSOR_DOMAINS[self]

    @classmethod
    def from_wire_id(cls, wire_id: int) -> "SensorKind":
        for kind, wid in _SENSOR_WIRE_IDS.items():
            if wid == wire_id:
                return kind
        raise ValueError(f"no sensor with wire id {wire_id}")


class ActuatorKind(str, Enum):
    """The six actuators, one per face of the actuator cube."""

    RING_GRAPH = "ring_graph"
    POWER_LED = "power_led"
    SOUND = "sound"
    PELTIER = "peltier"
    VIBRATION = "vibration"
    FAN = "fan"

    @property
    def human_sense(self) -> HumanSense:
        return _ACTUATOR_SENSES[self]

    @property
    def output_domain(self) -> str:
        return _ACTUATOR_OUTPUTS[self]


@dataclass(frozen=True)
class RawDomain:
    lo: float
    hi: float
    unit: str


_SENSOR_WIRE_IDS: Mapping[SensorKind, int] = {
    SensorKind.POTENTIOMETER: 0,
    SensorKind.THERMOMETER: 1,
    SensorKind.MICROPHONE: 2,
    SensorKind.DISTANCE: 3,
    SensorKind.PIR: 4,
    SensorKind.LIGHT: 5,
}

_SENSOR_SENSES: Mapping[SensorKind, HumanSense] = {
    SensorKind.POTENTIOMETER: HumanSense.TOUCH,
    SensorKind.THERMOMETER: HumanSense.TEMPERATURE,
    SensorKind.MICROPHONE: HumanSense.HEARING,
    SensorKind.DISTANCE: HumanSense.SIGHT,
    SensorKind.PIR: HumanSense.SIGHT,
    SensorKind.LIGHT: HumanSense.SIGHT,
}

_SENSOR_DOMAINS: Mapping[SensorKind, RawDomain] = {
    SensorKind.POTENTIOMETER: RawDomain(0, 1023, "AD counts (0..270 deg dial)"),
    SensorKind.THERMOMETER: RawDomain(0, 50, "degC"),
    SensorKind.MICROPHONE: RawDomain(0, 1023, "AD counts per sample"),
    SensorKind.DISTANCE: RawDomain(0, 72, "cm (NoEcho distinct)"),
    SensorKind.PIR: RawDomain(0, 1, "binary"),
    SensorKind.LIGHT: RawDomain(0, 65535, "lx"),
}

_ACTUATOR_SENSES: Mapping[ActuatorKind, HumanSense] = {
    ActuatorKind.RING_GRAPH: HumanSense.SIGHT,
    ActuatorKind.POWER_LED: HumanSense.SIGHT,
    ActuatorKind.SOUND: HumanSense.HEARING,
    ActuatorKind.PELTIER: HumanSense.TEMPERATURE,
    ActuatorKind.VIBRATION: HumanSense.TOUCH,
    ActuatorKind.FAN: HumanSense.TOUCH,
}

_ACTUATOR_OUTPUTS: Mapping[ActuatorKind, str] = {
    ActuatorKind.RING_GRAPH: "24-pixel ring, lit count 0..24, color per sensor",
    ActuatorKind.POWER_LED: "brightness 0..255",
    ActuatorKind.SOUND: "MIDI note events, notes 51..74",
    ActuatorKind.PELTIER: "signed PWM -255..255 (bipolar) or 0..255 (heat only)",
    ActuatorKind.VIBRATION: "PWM 0 or 64..255",
    ActuatorKind.FAN: "PWM 0 or 160..255",
}


@dataclass(frozen=True)
class NormalizedValue:
    """The intermediate value crossing the wire: 0..24 plus its source sensor.

    The source is kept end-to-end because the ring graph color-codes by
    sensor and mappings may consider both endpoints.
    """

    value: int
    sensor: SensorKind

    def __post_init__(self) -> None:
        if not isinstance(self.value, int) or not 0 <= self.value <= VALUE_MAX:
            raise ValueError(f"normalized value must be an integer 0..{VALUE_MAX}, got {self.value!r}")


class Face(str, Enum):
    """The six faces, named by their outward normal in the body frame."""

    POS_X = "pos_x"
    NEG_X = "neg_x"
    POS_Y = "pos_y"
    NEG_Y = "neg_y"
    POS_Z = "pos_z"
    NEG_Z = "neg_z"

    @property
    def normal(self) -> Tuple[float, float, float]:
        return _FACE_NORMALS[self]


#: Fixed face order; also the tie-break order for top-face detection.
FACE_ORDER = (Face.POS_X, Face.NEG_X, Face.POS_Y, Face.NEG_Y, Face.POS_Z, Face.NEG_Z)

_FACE_NORMALS: Mapping[Face, Tuple[float, float, float]] = {
    Face.POS_X: (1.0, 0.0, 0.0),
    Face.NEG_X: (-1.0, 0.0, 0.0),
    Face.POS_Y: (0.0, 1.0, 0.0),
    Face.NEG_Y: (0.0, -1.0, 0.0),
    Face.POS_Z: (0.0, 0.0, 1.0),
    Face.NEG_Z: (0.0, 0.0, -1.0),
}


@dataclass(frozen=True)
class CubeOrientation:
    """World-up expressed in the cube's body frame. Always unit-length.

    Minimal state for top-face detection; no full attitude is tracked.
    """

    up_body: Tuple[float, float, float]

    @classmethod
    def from_vector(cls, x: float, y: float, z: float) -> "CubeOrientation":
        """Build from any non-zero vector, normalizing it."""
        norm = math.sqrt(x * x + y * y + z * z)
        if not math.isfinite(norm) or norm < 1e-9:
            raise InvalidOrientation(f"cannot orient from vector ({x}, {y}, {z})")
        return cls((x / norm, y / norm, z / norm))

    @classmethod
    def face_up(cls, face: Face) -> "CubeOrientation":
        return cls(face.normal)


def face_from_orientation(o: CubeOrientation, previous: Optional[Face] = None) -> Face:
    """Return the upward face: the one whose outward normal best aligns with up.

    With a previous face given, it is retained unless the challenger's dot
    product beats the previous face's by at least FACE_HYSTERESIS. Ties break
    in FACE_ORDER.
    """
    x, y, z = o.up_body
    norm = math.sqrt(x * x + y * y + z * z)
    if not math.isfinite(norm) or abs(norm - 1.0) > 1e-6:
        raise InvalidOrientation(f"up vector {o.up_body} is not unit-length")

    dots = {face: x * nx + y * ny + z * nz for face, (nx, ny, nz) in _FACE_NORMALS.items()}
    winner = FACE_ORDER[0]
    for face in FACE_ORDER[1:]:
        if dots[face] > dots[winner]:
            winner = face

    if previous is None or winner is previous:
        return winner
    if dots[winner] - dots[previous] >= FACE_HYSTERESIS:
        return winner
    return previous


class FaceAssignment:
    """Bijective face -> kind map for one cube."""

    def __init__(self, mapping: Mapping[Face, Union[SensorKind, ActuatorKind]]):
        missing = [f for f in FACE_ORDER if f not in mapping]
        if missing:
            raise ValueError(f"assignment missing faces: {[f.value for f in missing]}")
        kinds = list(mapping.values())
        if len(set(kinds)) != 6:
            raise ValueError("assignment must map the six faces to six distinct kinds")
        self._by_face = dict(mapping)
        self._by_kind = {kind: face for face, kind in mapping.items()}

    def kind_on(self, face: Face):
        return self._by_face[face]

    def face_of(self, kind) -> Face:
        try:
            return self._by_kind[kind]
        except KeyError:
            raise KeyError(f"{getattr(kind, 'value', kind)} is not mounted on this cube") from None

    def kinds(self):
        return [self._by_face[f] for f in FACE_ORDER]

    def as_dict(self) -> dict:
        return {f.value: self._by_face[f].value for f in FACE_ORDER}


def active_kind(assignment: FaceAssignment, face: Face):
    """The kind mounted on the given face."""
    return assignment.kind_on(face)


# --- actuation commands ----------------------------------------------------

RGB = Tuple[int, int, int]


@dataclass(frozen=True)
class RingGraphCommand:
    lit_count: int
    color: RGB
    per_pixel_brightness: int

    def __post_init__(self) -> None:
        if not 0 <= self.lit_count <= 24:
            raise ValueError(f"lit_count out of range: {self.lit_count}")
        if not 0 <= self.per_pixel_brightness <= 255:
            raise ValueError(f"per_pixel_brightness out of range: {self.per_pixel_brightness}")
        if len(self.color) != 3 or any(not 0 <= c <= 255 for c in self.color):
            raise ValueError(f"bad RGB triple: {self.color}")


@dataclass(frozen=True)
class PowerLedCommand:
    brightness: int

    def __post_init__(self) -> None:
        if not 0 <= self.brightness <= 255:
            raise ValueError(f"brightness out of range: {self.brightness}")


@dataclass(frozen=True)
class NoteOn:
    note: int
    velocity: int

    def __post_init__(self) -> None:
        if not 0 <= self.note <= 127:
            raise ValueError(f"note out of range: {self.note}")
        if not 0 <= self.velocity <= 127:
            raise ValueError(f"velocity out of range: {self.velocity}")


@dataclass(frozen=True)
class NoteOff:
    note: int

    def __post_init__(self) -> None:
        if not 0 <= self.note <= 127:
            raise ValueError(f"note out of range: {self.note}")


MidiEvent = Union[NoteOn, NoteOff]


@dataclass(frozen=True)
class SoundCommand:
    """MIDI events to emit now, oldest first. Empty when nothing changes."""

    events: Tuple[MidiEvent, ...]


@dataclass(frozen=True)
class PeltierCommand:
    pwm: int  # signed: negative cools, positive heats

    def __post_init__(self) -> None:
        if not -255 <= self.pwm <= 255:
            raise ValueError(f"peltier pwm out of range: {self.pwm}")


# The built-in mappings keep vibration pwm in {0} + 64..255 and fan pwm in
# {0} + 160..255; sketched custom mappings may use the full 0..255, so the
# command types enforce only the physical PWM range.


@dataclass(frozen=True)
class VibrationCommand:
    pwm: int

    def __post_init__(self) -> None:
        if not 0 <= self.pwm <= 255:
            raise ValueError(f"vibration pwm out of range: {self.pwm}")


@dataclass(frozen=True)
class FanCommand:
    pwm: int

    def __post_init__(self) -> None:
        if not 0 <= self.pwm <= 255:
            raise ValueError(f"fan pwm out of range: {self.pwm}")


ActuationCommand = Union[
    RingGraphCommand,
    PowerLedCommand,
    SoundCommand,
    PeltierCommand,
    VibrationCommand,
    FanCommand,
]


def round_half_away(x: float) -> int:
    """Round half away from zero; the one rounding rule used everywhere."""
    if x >= 0:
        return int(math.floor(x + 0.5))
    return int(math.ceil(x - 0.5))


def clamp(x: float, lo: float, hi: float) -> float:
    return lo if x < lo else hi if x > hi else x
