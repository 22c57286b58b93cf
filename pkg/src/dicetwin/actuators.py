"""Actuator side: turn a received 0..24 value into a concrete output command.

Every sensor may feed every actuator (36 combinations); value 0 is always the
actuator's neutral output. The ring graph color-codes by source sensor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

from .model import (
    RGB,
    ActuationCommand,
    ActuatorKind,
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
    round_half_away,
)

#: Static per-pixel ring brightness (0..255); the ring encodes count, not level.
RING_PIXEL_BRIGHTNESS = 64

#: Fixed MIDI velocity; velocity modulation is out of scope.
MIDI_VELOCITY = 100

#: Offset from value to MIDI note: 1..24 -> notes 51..74.
NOTE_OFFSET = 50

DEFAULT_PALETTE: Dict[SensorKind, RGB] = {
    SensorKind.POTENTIOMETER: (255, 255, 255),  # white
    SensorKind.THERMOMETER: (255, 0, 0),  # red
    SensorKind.MICROPHONE: (0, 255, 0),  # green
    SensorKind.DISTANCE: (0, 0, 255),  # blue
    SensorKind.PIR: (255, 255, 0),  # yellow
    SensorKind.LIGHT: (255, 128, 0),  # orange
}


class PeltierMode(str, Enum):
    BIPOLAR = "bipolar"  # 0..12 cools, 12..24 heats
    HEAT_ONLY = "heat_only"  # 0..24 from neutral to full heat


def actuate_ring_graph(
    v: NormalizedValue,
    palette: Optional[Dict[SensorKind, RGB]] = None,
    pixel_brightness: int = RING_PIXEL_BRIGHTNESS,
) -> RingGraphCommand:
    """Light as many of the 24 pixels as the value, in the sensor's color."""
    colors = palette if palette is not None else DEFAULT_PALETTE
    return RingGraphCommand(v.value, colors[v.sensor], pixel_brightness)


def actuate_power_led(v: NormalizedValue) -> PowerLedCommand:
    """Square the value onto 0..576, then scale to 0..255 brightness."""
    return PowerLedCommand(round_half_away(v.value * v.value * 255 / 576))


def _note_change(note: int, current_note: Optional[int], velocity: int) -> SoundCommand:
    """Events needed to go from current_note to note (0 = silence)."""
    if note == 0:
        events: Tuple = () if current_note is None else (NoteOff(current_note),)
        return SoundCommand(events)
    if current_note == note:
        return SoundCommand(())
    if current_note is None:
        return SoundCommand((NoteOn(note, velocity),))
    return SoundCommand((NoteOff(current_note), NoteOn(note, velocity)))


def actuate_sound(
    v: NormalizedValue, current_note: Optional[int] = None, velocity: int = MIDI_VELOCITY
) -> SoundCommand:
    """0 releases the playing note; 1..24 plays note value+50.

    Emits nothing when the requested note is already sounding, so a stream of
    equal values never retriggers.
    """
    note = 0 if v.value == 0 else v.value + NOTE_OFFSET
    return _note_change(note, current_note, velocity)


def actuate_peltier(v: NormalizedValue, mode: PeltierMode = PeltierMode.BIPOLAR) -> PeltierCommand:
    """Bipolar: 0..12 cools (-255..0), 12..24 heats (0..255). Heat-only: 0..255."""
    if mode is PeltierMode.BIPOLAR:
        return PeltierCommand(round_half_away((v.value - 12) * 255 / 12))
    return PeltierCommand(round_half_away(v.value * 255 / 24))


def actuate_vibration(v: NormalizedValue) -> VibrationCommand:
    """0 is off; 1..24 spans the motor's working band 64..255."""
    if v.value == 0:
        return VibrationCommand(0)
    return VibrationCommand(round_half_away(64 + (v.value - 1) * 191 / 23))


def actuate_fan(v: NormalizedValue) -> FanCommand:
    """0 is off; 1..24 spans the fan's working band 160..255."""
    if v.value == 0:
        return FanCommand(0)
    return FanCommand(round_half_away(160 + (v.value - 1) * 95 / 23))


@dataclass
class DispatchContext:
    """Mutable per-session actuation context owned by the actuator cube."""

    palette: Dict[SensorKind, RGB] = field(default_factory=lambda: dict(DEFAULT_PALETTE))
    pixel_brightness: int = RING_PIXEL_BRIGHTNESS
    velocity: int = MIDI_VELOCITY
    peltier_mode: PeltierMode = PeltierMode.BIPOLAR
    current_note: Optional[int] = None


def dispatch(v: NormalizedValue, active: ActuatorKind, ctx: Optional[DispatchContext] = None) -> ActuationCommand:
    """Route the value through the active actuator's mapping.

    Updates ctx.current_note for the sound actuator's retrigger suppression.
    """
    if ctx is None:
        ctx = DispatchContext()
    if active is ActuatorKind.RING_GRAPH:
        return actuate_ring_graph(v, ctx.palette, ctx.pixel_brightness)
    if active is ActuatorKind.POWER_LED:
        return actuate_power_led(v)
    if active is ActuatorKind.SOUND:
        cmd = actuate_sound(v, ctx.current_note, ctx.velocity)
        ctx.current_note = None if v.value == 0 else v.value + NOTE_OFFSET
        return cmd
    if active is ActuatorKind.PELTIER:
        return actuate_peltier(v, ctx.peltier_mode)
    if active is ActuatorKind.VIBRATION:
        return actuate_vibration(v)
    if active is ActuatorKind.FAN:
        return actuate_fan(v)
    raise ValueError(f"unknown actuator {active!r}")


#: Physical output range per actuator, for custom (sketched) mapping outputs.
SCALAR_RANGES: Dict[ActuatorKind, Tuple[int, int]] = {
    ActuatorKind.RING_GRAPH: (0, 24),
    ActuatorKind.POWER_LED: (0, 255),
    ActuatorKind.SOUND: (0, 127),  # the scalar IS the MIDI note, 0 = off
    ActuatorKind.PELTIER: (-255, 255),
    ActuatorKind.VIBRATION: (0, 255),
    ActuatorKind.FAN: (0, 255),
}


def command_from_scalar(
    active: ActuatorKind, scalar: int, source: SensorKind, ctx: DispatchContext
) -> ActuationCommand:
    """Build a command from a custom mapping's output scalar (already in range)."""
    if active is ActuatorKind.RING_GRAPH:
        return RingGraphCommand(scalar, ctx.palette[source], ctx.pixel_brightness)
    if active is ActuatorKind.POWER_LED:
        return PowerLedCommand(scalar)
    if active is ActuatorKind.SOUND:
        cmd = _note_change(scalar, ctx.current_note, ctx.velocity)
        ctx.current_note = scalar or None
        return cmd
    if active is ActuatorKind.PELTIER:
        return PeltierCommand(scalar)
    if active is ActuatorKind.VIBRATION:
        return VibrationCommand(scalar)
    if active is ActuatorKind.FAN:
        return FanCommand(scalar)
    raise ValueError(f"unknown actuator {active!r}")


def neutral_command(active: ActuatorKind, source: SensorKind, ctx: DispatchContext) -> ActuationCommand:
    """Failover output when the link goes stale: everything off, Peltier at 0.

    Unlike dispatch(value 0), the bipolar Peltier goes to pwm 0 here, not to
    full cooling.
    """
    if active is ActuatorKind.RING_GRAPH:
        return RingGraphCommand(0, ctx.palette[source], ctx.pixel_brightness)
    if active is ActuatorKind.POWER_LED:
        return PowerLedCommand(0)
    if active is ActuatorKind.SOUND:
        cmd = _note_change(0, ctx.current_note, ctx.velocity)
        ctx.current_note = None
        return cmd
    if active is ActuatorKind.PELTIER:
        return PeltierCommand(0)
    if active is ActuatorKind.VIBRATION:
        return VibrationCommand(0)
    if active is ActuatorKind.FAN:
        return FanCommand(0)
    raise ValueError(f"unknown actuator {active!r}")
