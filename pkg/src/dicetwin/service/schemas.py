"""Wire schemas for the steering server: commands in, snapshots out.

The command set mirrors the scenario event set one to one, so steering a live
session and replaying a scenario drive the engine through the same code path.
"""

from __future__ import annotations

from typing import Annotated, Dict, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, model_validator

from ..actuators import PeltierMode
from ..model import ActuatorKind, Face, SensorKind
from ..scenario import (
    RotateEvent,
    ScenarioEvent,
    SetLinkEvent,
    SetMappingEvent,
    SetPeltierModeEvent,
    StimulusEvent,
)
from ..sensors import ConstantWave, SineWave

PROTO_VERSION = 1


class _Cmd(BaseModel):
    model_config = ConfigDict(extra="forbid")


class RotateCmd(_Cmd):
    cmd: Literal["rotate"]
    cube: Literal["sensor", "actuator"]
    top: str  # face name or kind name; membership is checked by the engine

    @model_validator(mode="after")
    def _known_top(self) -> "RotateCmd":
        for enum_cls in (Face, SensorKind, ActuatorKind):
            try:
                enum_cls(self.top)
                return self
            except ValueError:
                continue
        raise ValueError(f"unknown face or kind {self.top!r}")


class WaveformSpec(_Cmd):
    type: Literal["constant", "sine"]
    level: float = 0.0  # constant only
    freq_hz: float = Field(default=440.0, gt=0)
    amplitude: float = Field(default=300.0, ge=0)
    dc: float = 512.0


class StimulusCmd(_Cmd):
    cmd: Literal["stimulus"]
    sensor: SensorKind
    value: Optional[Union[float, Literal["no_echo"]]] = None
    waveform: Optional[WaveformSpec] = None

    @model_validator(mode="after")
    def _consistent(self) -> "StimulusCmd":
        if self.waveform is not None:
            if self.sensor is not SensorKind.MICROPHONE:
                raise ValueError("waveform stimulus is only valid for the microphone")
            if self.value is not None:
                raise ValueError("give either value or waveform, not both")
            return self
        if self.value is None or self.value == "no_echo":
            if self.sensor is not SensorKind.DISTANCE:
                raise ValueError("only the distance sensor accepts no_echo")
        return self


class SetLinkCmd(_Cmd):
    cmd: Literal["set_link"]
    loss: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    latency_ms: Optional[float] = Field(default=None, ge=0.0)
    jitter_ms: Optional[float] = Field(default=None, ge=0.0)


class SetMappingCmd(_Cmd):
    cmd: Literal["set_mapping"]
    target: str  # "sensor:<kind>" or "actuator:<kind>"
    program: str


class SetPeltierModeCmd(_Cmd):
    cmd: Literal["set_peltier_mode"]
    mode: PeltierMode


Command = Annotated[
    Union[RotateCmd, StimulusCmd, SetLinkCmd, SetMappingCmd, SetPeltierModeCmd],
    Field(discriminator="cmd"),
]

COMMAND_ADAPTER: TypeAdapter = TypeAdapter(Command)


def _resolve_top(raw: str) -> Union[Face, SensorKind, ActuatorKind]:
    for enum_cls in (Face, SensorKind, ActuatorKind):
        try:
            return enum_cls(raw)
        except ValueError:
            continue
    raise ValueError(f"unknown face or kind {raw!r}")


def command_to_event(cmd: Command, t_ms: float) -> ScenarioEvent:
    """Translate a steering command into the matching scenario event."""
    if isinstance(cmd, RotateCmd):
        return RotateEvent(t_ms, cmd.cube, _resolve_top(cmd.top))
    if isinstance(cmd, StimulusCmd):
        if cmd.waveform is not None:
            w = cmd.waveform
            wave = ConstantWave(w.level) if w.type == "constant" else SineWave(w.freq_hz, w.amplitude, w.dc)
            return StimulusEvent(t_ms, cmd.sensor, waveform=wave)
        value = None if cmd.value in (None, "no_echo") else float(cmd.value)
        return StimulusEvent(t_ms, cmd.sensor, value=value)
    if isinstance(cmd, SetLinkCmd):
        return SetLinkEvent(t_ms, loss=cmd.loss, latency_ms=cmd.latency_ms, jitter_ms=cmd.jitter_ms)
    if isinstance(cmd, SetMappingCmd):
        return SetMappingEvent(t_ms, cmd.target, cmd.program)
    if isinstance(cmd, SetPeltierModeCmd):
        return SetPeltierModeEvent(t_ms, cmd.mode)
    raise TypeError(f"unknown command {cmd!r}")


# --- snapshots ----------------------------------------------------------------


class SensorReading(BaseModel):
    raw: Optional[float]  # physical units; None while the echo is lost
    normalized: int = Field(ge=0, le=24)


class MappingInfo(BaseModel):
    text: str
    custom: bool


class SensorCubeView(BaseModel):
    active_face: Face
    active_sensor: SensorKind
    faces: Dict[Face, SensorKind]


class ActuatorCubeView(BaseModel):
    active_face: Face
    active_actuator: ActuatorKind
    faces: Dict[Face, ActuatorKind]
    peltier_mode: PeltierMode
    current_note: Optional[int]


class LinkView(BaseModel):
    sent: int
    delivered: int
    dropped: int
    loss: float
    latency_ms: float
    jitter_ms: float


class Snapshot(BaseModel):
    proto: Literal[1] = PROTO_VERSION
    t_ms: float
    sensor_cube: SensorCubeView
    actuator_cube: ActuatorCubeView
    sensors: Dict[SensorKind, SensorReading]
    value: Optional[int]  # last normalized value the actuator cube received
    stale: bool
    command: Optional[dict]  # latest ActuationCommand, JSON shape as in traces
    link: LinkView
    mappings: Dict[str, MappingInfo]
    mapping_error: Optional[str] = None


class CommandAck(BaseModel):
    ack: str


class CommandError(BaseModel):
    error: Literal["parse", "schema", "command"]
    detail: str
