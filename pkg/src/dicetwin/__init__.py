"""Software twin of a two-cube tangible interface: a sensor die and an
actuator die joined by a lossy datagram link, with swappable value mappings."""

from .actuators import DispatchContext, PeltierMode, dispatch, neutral_command
from .config import ConfigError, SimConfig, load_config, parse_config
from .engine import Engine, EngineError, validate_mapping
from .link import (
    Frame,
    FrameError,
    LinkConditions,
    LossyLink,
    decode,
    encode,
    encode_frame,
)
from .mapdsl import (
    MappingError,
    MappingProgram,
    check_range,
    default_program_text,
    eval_program,
    parse,
    to_text,
)
from .model import (
    ActuatorKind,
    CubeOrientation,
    DiceError,
    Face,
    FaceAssignment,
    FanCommand,
    NormalizedValue,
    NoteOff,
    NoteOn,
    PeltierCommand,
    PowerLedCommand,
    RingGraphCommand,
    SensorKind,
    SoundCommand,
    VibrationCommand,
    face_from_orientation,
)
from .scenario import (
    ScenarioError,
    TraceRecord,
    load_scenario,
    parse_scenario,
    trace_text,
    write_trace,
)
from .sensors import SensorSampler, StimulusState

__version__ = "0.1.0"

__all__ = [
    "ActuatorKind",
    "ConfigError",
    "CubeOrientation",
    "DiceError",
    "DispatchContext",
    "Engine",
    "EngineError",
    "Face",
    "FaceAssignment",
    "FanCommand",
    "Frame",
    "FrameError",
    "LinkConditions",
    "LossyLink",
    "MappingError",
    "MappingProgram",
    "NormalizedValue",
    "NoteOff",
    "NoteOn",
    "PeltierCommand",
    "PeltierMode",
    "PowerLedCommand",
    "RingGraphCommand",
    "ScenarioError",
    "SensorKind",
    "SensorSampler",
    "SimConfig",
    "SoundCommand",
    "StimulusState",
    "TraceRecord",
    "VibrationCommand",
    "check_range",
    "decode",
    "default_program_text",
    "dispatch",
    "encode",
    "encode_frame",
    "eval_program",
    "face_from_orientation",
    "load_config",
    "load_scenario",
    "neutral_command",
    "parse",
    "parse_config",
    "parse_scenario",
    "to_text",
    "trace_text",
    "validate_mapping",
    "write_trace",
]
