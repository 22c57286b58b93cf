"""Deterministic discrete-event engine binding both cubes and the link.

One event queue ordered by (time, priority, insertion order) with priorities
scenario < sampling < delivery < stale check. Headless runs advance a virtual
clock event-to-event; the serve runtime pumps the same engine against the
wall clock. Given (scenario, seed, config), a run is fully reproducible.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import queue
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple, Union

from .actuators import (
    DispatchContext,
    PeltierMode,
    SCALAR_RANGES,
    command_from_scalar,
    dispatch,
    neutral_command,
)
from .config import SimConfig
from .link import (
    STALE_TIMEOUT_MS,
    FrameError,
    LinkConditions,
    LossyLink,
    decode,
    encode,
    FLAG_CUSTOM_MAPPING,
    is_stale,
    seq_is_newer,
)
from .mapdsl import (
    ACTUATOR_CHECK_DOMAIN,
    EvalDomainError,
    MappingProgram,
    MappingSemanticsError,
    NoMatchingCase,
    SENSOR_CHECK_DOMAIN,
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
    NormalizedValue,
    SensorKind,
    active_kind,
    clamp,
    face_from_orientation,
    round_half_away,
)
from .scenario import (
    EndEvent,
    RotateEvent,
    ScenarioEvent,
    SetLinkEvent,
    SetMappingEvent,
    SetPeltierModeEvent,
    StimulusEvent,
    TraceRecord,
)
from .sensors import SensorSampler, StimulusState

log = logging.getLogger(__name__)

PRIO_SCENARIO = 0
PRIO_SAMPLE = 1
PRIO_DELIVER = 2
PRIO_STALE = 3

#: Stale checks piggyback on this grid when no frames arrive.
STALE_CHECK_PERIOD_MS = 50.0


class EngineError(DiceError):
    pass


def resolve_mapping_target(target: str) -> Tuple[str, Union[SensorKind, ActuatorKind]]:
    """Split 'sensor:<kind>' / 'actuator:<kind>' into (side, kind)."""
    side, sep, name = target.partition(":")
    if not sep or side not in ("sensor", "actuator"):
        raise EngineError(
            f"mapping target must be sensor:<kind> or actuator:<kind>, got {target!r}"
        )
    try:
        kind = SensorKind(name) if side == "sensor" else ActuatorKind(name)
    except ValueError:
        raise EngineError(f"unknown {side} kind {name!r}") from None
    return side, kind


def validate_mapping(target: str, program_text: str) -> MappingProgram:
    """Parse and range-check a program for its target; raise if unusable.

    Uncovered inputs are allowed (they hold the neutral output at runtime);
    stage domain errors are not, since they would fire on ordinary inputs.
    """
    side, kind = resolve_mapping_target(target)
    program = parse(program_text)
    if side == "sensor":
        domain, step = SENSOR_CHECK_DOMAIN[kind]
    else:
        domain, step = ACTUATOR_CHECK_DOMAIN
    report = check_range(program, domain, step)
    if report.domain_error_inputs:
        x = report.domain_error_inputs[0]
        raise MappingSemanticsError(f"stage domain error over input domain (first at {x:g})")
    return program


@dataclass
class SensorCubeState:
    assignment: FaceAssignment
    orientation: CubeOrientation = field(default_factory=lambda: CubeOrientation.face_up(Face.POS_Z))
    active_face: Face = Face.POS_Z
    stimulus: StimulusState = field(default_factory=StimulusState)
    custom_programs: Dict[SensorKind, MappingProgram] = field(default_factory=dict)

    @property
    def active_sensor(self) -> SensorKind:
        return active_kind(self.assignment, self.active_face)


@dataclass
class ActuatorCubeState:
    assignment: FaceAssignment
    ctx: DispatchContext
    orientation: CubeOrientation = field(default_factory=lambda: CubeOrientation.face_up(Face.POS_Z))
    active_face: Face = Face.POS_Z
    custom_programs: Dict[ActuatorKind, MappingProgram] = field(default_factory=dict)
    last_value: Optional[NormalizedValue] = None
    last_rx_ms: Optional[float] = None
    last_seq: Optional[int] = None
    stale_applied: bool = False
    last_command: Optional[object] = None

    @property
    def active_actuator(self) -> ActuatorKind:
        return active_kind(self.assignment, self.active_face)


class Engine:
    """Both cube state machines plus the link, driven by one event queue."""

    def __init__(
        self,
        config: Optional[SimConfig] = None,
        seed: int = 0,
        link: Optional[LinkConditions] = None,
    ):
        self.config = config or SimConfig()
        base = link or LinkConditions()
        self.link = LossyLink(
            LinkConditions(base.drop_probability, base.base_latency_ms, base.jitter_ms, seed)
        )
        self.sensor_cube = SensorCubeState(self.config.sensor_assignment())
        self.actuator_cube = ActuatorCubeState(
            self.config.actuator_assignment(),
            DispatchContext(
                palette=dict(self.config.palette),
                pixel_brightness=self.config.ring_pixel_brightness,
                velocity=self.config.midi_velocity,
                peltier_mode=self.config.peltier_mode,
            ),
        )
        self.sampler = SensorSampler(dict(self.config.sampling_period_ms))
        self.t_ms = 0.0
        self.records: List[TraceRecord] = []
        self.sent_values: List[NormalizedValue] = []
        self.commands: "queue.SimpleQueue" = queue.SimpleQueue()
        self.frame_tap: Optional[Callable[[bytes], None]] = None
        self.loopback = True  # False when frames travel over an external transport
        self._heap: List[Tuple[float, int, int, object]] = []
        self._counter = itertools.count()
        self._tx_seq = 0
        self._ended = False
        self._tick_ms = min(self.config.sampling_period_ms.values())
        self._schedule(0.0, PRIO_SAMPLE, ("sample", None))
        self._schedule(0.0, PRIO_STALE, ("stale", None))

    # --- event plumbing -----------------------------------------------------

    def _schedule(self, t_ms: float, prio: int, item: object) -> None:
        heapq.heappush(self._heap, (t_ms, prio, next(self._counter), item))

    def schedule_events(self, events: List[ScenarioEvent]) -> None:
        for ev in events:
            self._schedule(ev.t_ms, PRIO_SCENARIO, ("scenario", ev))

    def submit(self, event: ScenarioEvent) -> None:
        """Thread-safe external command entry; drained at the next pump."""
        self.commands.put(event)

    def drain_commands(self) -> List[Exception]:
        """Apply queued external commands at the current time; collect errors."""
        errors: List[Exception] = []
        while True:
            try:
                ev = self.commands.get_nowait()
            except queue.Empty:
                return errors
            try:
                self.apply_event(ev)
            except DiceError as exc:
                log.warning("command rejected: %s", exc)
                errors.append(exc)

    # --- public stepping ----------------------------------------------------

    def run(self, events: List[ScenarioEvent]) -> List[TraceRecord]:
        """Headless run: schedule everything and advance until the end event."""
        self.schedule_events(events)
        while self._heap and not self._ended:
            self._pop_and_handle()
        return self.records

    def step_until(self, until_ms: float) -> List[TraceRecord]:
        """Advance the virtual clock, processing every event due by until_ms."""
        start = len(self.records)
        while self._heap and not self._ended and self._heap[0][0] <= until_ms:
            self._pop_and_handle()
        if not self._ended and until_ms > self.t_ms:
            self.t_ms = until_ms
        return self.records[start:]

    def _pop_and_handle(self) -> None:
        t, _prio, _n, item = heapq.heappop(self._heap)
        self.t_ms = t
        kind, payload = item
        if kind == "scenario":
            self.apply_event(payload)
        elif kind == "sample":
            self._handle_sample(t)
        elif kind == "deliver":
            frame_bytes, warnings = payload
            self._handle_delivery(t, frame_bytes, warnings)
        elif kind == "stale":
            self._handle_stale_check(t)
        else:  # pragma: no cover
            raise AssertionError(f"unknown event kind {kind!r}")

    # --- event application (shared by scenarios and the serve runtime) ------

    def apply_event(self, ev: ScenarioEvent) -> None:
        if isinstance(ev, StimulusEvent):
            if ev.waveform is not None:
                self.sensor_cube.stimulus.waveform = ev.waveform
            else:
                self.sensor_cube.stimulus.set_scalar(ev.sensor, ev.value)
        elif isinstance(ev, RotateEvent):
            self.rotate(ev.cube, ev.top)
        elif isinstance(ev, SetLinkEvent):
            c = self.link.conditions
            self.link.set_conditions(
                LinkConditions(
                    c.drop_probability if ev.loss is None else ev.loss,
                    c.base_latency_ms if ev.latency_ms is None else ev.latency_ms,
                    c.jitter_ms if ev.jitter_ms is None else ev.jitter_ms,
                    c.seed,
                )
            )
        elif isinstance(ev, SetMappingEvent):
            self.set_mapping(ev.target, ev.program)
        elif isinstance(ev, SetPeltierModeEvent):
            self.actuator_cube.ctx.peltier_mode = ev.mode
        elif isinstance(ev, EndEvent):
            self._ended = True
        else:  # pragma: no cover
            raise AssertionError(f"unknown event {ev!r}")

    def rotate(self, cube: str, top: Union[Face, SensorKind, ActuatorKind]) -> Face:
        """Bring the requested face (or the face carrying the kind) to the top."""
        if cube == "sensor":
            state = self.sensor_cube
        elif cube == "actuator":
            state = self.actuator_cube
        else:
            raise EngineError(f"unknown cube {cube!r}")
        if isinstance(top, Face):
            face = top
        else:
            try:
                face = state.assignment.face_of(top)
            except KeyError:
                raise EngineError(
                    f"{getattr(top, 'value', top)} is not on the {cube} cube"
                ) from None
        was = state.active_face
        state.orientation = CubeOrientation.face_up(face)
        state.active_face = face_from_orientation(state.orientation, previous=state.active_face)
        if cube == "actuator" and state.active_face != was:
            ctx = self.actuator_cube.ctx
            if ctx.current_note is not None:
                # rotated away from the sound face: the note stops sounding
                ctx.current_note = None
        return state.active_face

    def set_mapping(self, target: str, program_text: str) -> None:
        """Install a custom program; rejects bad targets and broken programs."""
        side, kind = resolve_mapping_target(target)
        program = validate_mapping(target, program_text)
        if side == "sensor":
            self.sensor_cube.custom_programs[kind] = program
        else:
            self.actuator_cube.custom_programs[kind] = program

    def reset_mapping(self, target: str) -> None:
        side, kind = resolve_mapping_target(target)
        if side == "sensor":
            self.sensor_cube.custom_programs.pop(kind, None)
        else:
            self.actuator_cube.custom_programs.pop(kind, None)

    def mapping_texts(self) -> Dict[str, Dict[str, object]]:
        """Active program text per target, flagged when custom."""
        out: Dict[str, Dict[str, object]] = {}
        for s in SensorKind:
            custom = self.sensor_cube.custom_programs.get(s)
            out[f"sensor:{s.value}"] = {
                "text": to_text(custom) if custom else default_program_text(s),
                "custom": custom is not None,
            }
        mode = self.actuator_cube.ctx.peltier_mode
        for a in ActuatorKind:
            custom = self.actuator_cube.custom_programs.get(a)
            out[f"actuator:{a.value}"] = {
                "text": to_text(custom) if custom else default_program_text(a, mode),
                "custom": custom is not None,
            }
        return out

    # --- sampling side --------------------------------------------------------

    def _handle_sample(self, t: float) -> None:
        if self._ended:
            return
        state = self.sensor_cube
        sensor = state.active_sensor
        result = self.sampler.sample_tick(state.stimulus, sensor, t)
        if result is not None:
            nv, raw_sample = result
            warnings: List[str] = []
            custom = state.custom_programs.get(sensor)
            if custom is not None:
                value, warnings = self._eval_sensor_program(sensor, custom, raw_sample.value)
                nv = NormalizedValue(value, sensor)
            self._transmit(nv, raw_sample.value, custom is not None, warnings, t)
        self._schedule(t + self._tick_ms, PRIO_SAMPLE, ("sample", None))

    def _eval_sensor_program(
        self, sensor: SensorKind, program: MappingProgram, raw: float
    ) -> Tuple[int, List[str]]:
        warnings: List[str] = []
        if sensor is SensorKind.DISTANCE and raw < 0:  # NoEcho marker
            return 0, warnings
        try:
            value = eval_program(program, raw)
        except NoMatchingCase:
            warnings.append(f"sensor:{sensor.value} mapping covers no case for input {raw:g}; holding 0")
            return 0, warnings
        except EvalDomainError as exc:
            warnings.append(f"sensor:{sensor.value} mapping failed: {exc}; holding 0")
            return 0, warnings
        if not 0 <= value <= 24:
            warnings.append(f"sensor:{sensor.value} mapping output {value} clamped to 0..24")
            log.warning("custom mapping output %d outside 0..24; clamped", value)
            value = int(clamp(value, 0, 24))
        return value, warnings

    def _raw_hint(self, sensor: SensorKind, raw: float) -> Optional[int]:
        if raw < 0:  # NoEcho
            return None
        if sensor is SensorKind.THERMOMETER:
            scaled = raw * 100.0
        elif sensor is SensorKind.DISTANCE:
            scaled = raw * 10.0
        else:
            scaled = raw
        hint = round_half_away(scaled)
        return hint if 0 <= hint <= 0xFFFE else None

    def _transmit(
        self, nv: NormalizedValue, raw: float, custom: bool, warnings: List[str], t: float
    ) -> None:
        frame_bytes = encode(
            nv,
            self._tx_seq,
            self._raw_hint(nv.sensor, raw),
            FLAG_CUSTOM_MAPPING if custom else 0,
        )
        self._tx_seq = (self._tx_seq + 1) & 0xFFFF
        self.sent_values.append(nv)
        if self.frame_tap is not None:
            self.frame_tap(frame_bytes)
        if not self.loopback:
            return
        delivery = self.link.send(t)
        if delivery is not None:
            self._schedule(delivery, PRIO_DELIVER, ("deliver", (frame_bytes, warnings)))

    # --- actuator side --------------------------------------------------------

    def inject_frame(self, frame_bytes: bytes) -> None:
        """Feed a frame that arrived over an external transport (no loss sim)."""
        self._schedule(self.t_ms, PRIO_DELIVER, ("deliver", (frame_bytes, [])))

    def _handle_delivery(self, t: float, frame_bytes: bytes, warnings: List[str]) -> None:
        if self._ended:
            return
        try:
            frame = decode(frame_bytes)
        except FrameError as exc:
            log.warning("dropping invalid frame: %s", exc)
            return
        self.link.mark_delivered()
        ac = self.actuator_cube
        if not seq_is_newer(frame.seq, ac.last_seq):
            return  # late reordered frame
        ac.last_seq = frame.seq
        ac.last_rx_ms = t
        ac.stale_applied = False
        ac.last_value = frame.value
        command, more = self._actuate(frame.value)
        ac.last_command = command
        self._record(t, frame.value, command, warnings + more, stale=False)

    def _actuate(self, nv: NormalizedValue):
        ac = self.actuator_cube
        actuator = ac.active_actuator
        custom = ac.custom_programs.get(actuator)
        warnings: List[str] = []
        if custom is None:
            return dispatch(nv, actuator, ac.ctx), warnings
        try:
            scalar = eval_program(custom, nv.value)
        except NoMatchingCase:
            warnings.append(
                f"actuator:{actuator.value} mapping covers no case for value {nv.value}; holding neutral"
            )
            return neutral_command(actuator, nv.sensor, ac.ctx), warnings
        except EvalDomainError as exc:
            warnings.append(f"actuator:{actuator.value} mapping failed: {exc}; holding neutral")
            return neutral_command(actuator, nv.sensor, ac.ctx), warnings
        lo, hi = SCALAR_RANGES[actuator]
        if not lo <= scalar <= hi:
            warnings.append(f"actuator:{actuator.value} mapping output {scalar} clamped to {lo}..{hi}")
            log.warning("custom mapping output %d outside %d..%d; clamped", scalar, lo, hi)
            scalar = int(clamp(scalar, lo, hi))
        return command_from_scalar(actuator, scalar, nv.sensor, ac.ctx), warnings

    def _handle_stale_check(self, t: float) -> None:
        if self._ended:
            return
        ac = self.actuator_cube
        if (
            ac.last_rx_ms is not None
            and not ac.stale_applied
            and is_stale(ac.last_rx_ms, t, STALE_TIMEOUT_MS)
        ):
            ac.stale_applied = True
            source = ac.last_value.sensor if ac.last_value else SensorKind.POTENTIOMETER
            command = neutral_command(ac.active_actuator, source, ac.ctx)
            ac.last_command = command
            self._record(t, NormalizedValue(0, source), command, [], stale=True)
        self._schedule(t + STALE_CHECK_PERIOD_MS, PRIO_STALE, ("stale", None))

    def _record(
        self,
        t: float,
        nv: NormalizedValue,
        command,
        warnings: List[str],
        stale: bool,
    ) -> None:
        stats = self.link.stats
        self.records.append(
            TraceRecord(
                t_ms=t,
                active_sensor=nv.sensor,
                active_actuator=self.actuator_cube.active_actuator,
                value=nv.value,
                command=command,
                link_sent=stats.sent,
                link_delivered=stats.delivered,
                link_dropped=stats.dropped,
                stale=stale,
                warnings=tuple(warnings),
            )
        )
