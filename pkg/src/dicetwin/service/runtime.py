"""Wall-clock driver around the engine for the steering server.

One pump thread owns the engine: it drains the command queue, advances the
virtual clock to wall time, and publishes a fresh snapshot. Everything the
HTTP/WebSocket layer reads is a snapshot copy; everything it writes goes
through the command queue, so the engine stays single-threaded.
"""

from __future__ import annotations

import threading
import time
from typing import List, Optional

from ..engine import Engine, EngineError, validate_mapping
from ..link import FRAME_LEN
from ..mapdsl import MappingError
from ..model import Face, SensorKind
from ..scenario import command_to_json
from ..sensors import normalize_raw
from .schemas import (
    ActuatorCubeView,
    Command,
    LinkView,
    MappingInfo,
    RotateCmd,
    SensorCubeView,
    SensorReading,
    SetMappingCmd,
    Snapshot,
    command_to_event,
)

PUMP_PERIOD_S = 0.02
#: Serve mode keeps only a sliding window of trace records.
RECORD_KEEP = 512


class ServerRuntime:
    def __init__(self, engine: Engine, pump_period_s: float = PUMP_PERIOD_S):
        self.engine = engine
        self._pump_period_s = pump_period_s
        self._lock = threading.Lock()
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None
        self._t0 = time.monotonic()
        self._mapping_error: Optional[str] = None
        self._snapshot = self._build_snapshot()

    # --- lifecycle ---------------------------------------------------------

    def start(self) -> None:
        if self._thread is not None:
            return
        self._t0 = time.monotonic()
        self._thread = threading.Thread(target=self._pump, name="dicetwin-pump", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=2.0)
            self._thread = None

    def now_ms(self) -> float:
        return (time.monotonic() - self._t0) * 1000.0

    def _pump(self) -> None:
        while not self._stop.is_set():
            with self._lock:
                self.engine.drain_commands()
                self.engine.step_until(self.now_ms())
                if len(self.engine.records) > RECORD_KEEP:
                    del self.engine.records[:-RECORD_KEEP]
                self._snapshot = self._build_snapshot()
            time.sleep(self._pump_period_s)

    # --- command entry -------------------------------------------------------

    def check(self, cmd: Command) -> Optional[str]:
        """Pre-flight a command without touching engine state; None if fine."""
        try:
            if isinstance(cmd, SetMappingCmd):
                validate_mapping(cmd.target, cmd.program)
            elif isinstance(cmd, RotateCmd):
                with self._lock:
                    state = (
                        self.engine.sensor_cube
                        if cmd.cube == "sensor"
                        else self.engine.actuator_cube
                    )
                    known = {f.value for f in Face} | {k.value for k in state.assignment.kinds()}
                if cmd.top not in known:
                    return f"{cmd.top} is not on the {cmd.cube} cube"
        except (MappingError, EngineError) as exc:
            return str(exc)
        return None

    def submit(self, cmd: Command) -> Optional[str]:
        """Validate then enqueue; returns an error message instead of applying."""
        error = self.check(cmd)
        if isinstance(cmd, SetMappingCmd):
            with self._lock:
                self._mapping_error = error
        if error is not None:
            return error
        self.engine.submit(command_to_event(cmd, self.now_ms()))
        return None

    def inject_frame(self, frame_bytes: bytes) -> None:
        """Entry point for frames arriving over an external transport."""
        if len(frame_bytes) != FRAME_LEN:
            return
        with self._lock:
            self.engine.inject_frame(bytes(frame_bytes))

    # --- snapshots -----------------------------------------------------------

    def snapshot(self) -> Snapshot:
        with self._lock:
            return self._snapshot

    def _build_snapshot(self) -> Snapshot:
        e = self.engine
        sc, ac = e.sensor_cube, e.actuator_cube
        now = e.t_ms
        readings = {}
        for sensor in SensorKind:
            raw, _window = sc.stimulus.raw_reading(sensor, now)
            custom = sc.custom_programs.get(sensor)
            if custom is not None:
                marker = -1.0 if raw is None else raw
                normalized, _w = e._eval_sensor_program(sensor, custom, marker)
            else:
                normalized = normalize_raw(sensor, raw)
            readings[sensor] = SensorReading(raw=raw, normalized=normalized)
        c = e.link.conditions
        return Snapshot(
            t_ms=now,
            sensor_cube=SensorCubeView(
                active_face=sc.active_face,
                active_sensor=sc.active_sensor,
                faces=dict(sc.assignment.as_dict()),
            ),
            actuator_cube=ActuatorCubeView(
                active_face=ac.active_face,
                active_actuator=ac.active_actuator,
                faces=dict(ac.assignment.as_dict()),
                peltier_mode=ac.ctx.peltier_mode,
                current_note=ac.ctx.current_note,
            ),
            sensors=readings,
            value=None if ac.last_value is None else ac.last_value.value,
            stale=ac.stale_applied,
            command=None if ac.last_command is None else command_to_json(ac.last_command),
            link=LinkView(
                sent=e.link.stats.sent,
                delivered=e.link.stats.delivered,
                dropped=e.link.stats.dropped,
                loss=c.drop_probability,
                latency_ms=c.base_latency_ms,
                jitter_ms=c.jitter_ms,
            ),
            mappings={k: MappingInfo(**v) for k, v in e.mapping_texts().items()},
            mapping_error=self._mapping_error,
        )
