import pytest

from dicetwin.engine import Engine, EngineError, resolve_mapping_target, validate_mapping
from dicetwin.link import FLAG_CUSTOM_MAPPING, LinkConditions, decode, encode
from dicetwin.mapdsl import MappingSemanticsError, MappingSyntaxError
from dicetwin.model import (
    ActuatorKind,
    Face,
    NormalizedValue,
    PeltierCommand,
    PowerLedCommand,
    SensorKind,
    VibrationCommand,
)
from dicetwin.scenario import (
    EndEvent,
    RotateEvent,
    SetLinkEvent,
    SetMappingEvent,
    SetPeltierModeEvent,
    StimulusEvent,
    trace_text,
)
from dicetwin.actuators import PeltierMode


def heat_events(end_ms=1000.0):
    return [
        RotateEvent(0.0, "sensor", SensorKind.THERMOMETER),
        RotateEvent(0.0, "actuator", ActuatorKind.POWER_LED),
        StimulusEvent(0.0, SensorKind.THERMOMETER, value=50.0),
        EndEvent(end_ms),
    ]


def test_initial_state_uses_top_faces():
    eng = Engine()
    assert eng.sensor_cube.active_face is Face.POS_Z
    assert eng.sensor_cube.active_sensor is SensorKind.PIR
    assert eng.actuator_cube.active_actuator is ActuatorKind.VIBRATION


def test_quiet_run_emits_neutral_records():
    eng = Engine()
    records = eng.run([EndEvent(200.0)])
    assert len(records) == 4  # samples at 0, 50, 100, 150
    for rec in records:
        assert rec.active_sensor is SensorKind.PIR
        assert rec.active_actuator is ActuatorKind.VIBRATION
        assert rec.value == 0
        assert rec.command == VibrationCommand(0)


def test_heat_into_light_pipeline():
    eng = Engine(seed=1)
    records = eng.run(heat_events())
    assert records
    for rec in records:
        assert rec.active_sensor is SensorKind.THERMOMETER
        assert rec.active_actuator is ActuatorKind.POWER_LED
        assert rec.value == 24
        assert rec.command == PowerLedCommand(255)


def test_same_seed_gives_byte_identical_traces():
    events = heat_events(2000.0)
    link = LinkConditions(drop_probability=0.5, base_latency_ms=20.0, jitter_ms=10.0)
    a = Engine(seed=42, link=link).run(list(events))
    b = Engine(seed=42, link=link).run(list(events))
    assert trace_text(a) == trace_text(b)
    assert a == b


def test_every_sent_value_arrives_in_order_at_zero_loss():
    eng = Engine(seed=9)
    records = eng.run(heat_events(1500.0))
    assert [r.value for r in records] == [v.value for v in eng.sent_values]
    assert eng.link.stats.sent == eng.link.stats.delivered == len(records)
    assert eng.link.stats.dropped == 0


def test_latency_shifts_delivery_times():
    link = LinkConditions(base_latency_ms=30.0)
    eng = Engine(seed=0, link=link)
    records = eng.run(heat_events(500.0))
    assert [r.t_ms for r in records] == [t + 30.0 for t in (0.0, 50.0, 100.0, 150.0, 200.0, 250.0, 300.0, 350.0, 400.0, 450.0)]


def test_rotate_by_face_and_by_kind():
    eng = Engine()
    assert eng.rotate("sensor", Face.NEG_Z) is Face.NEG_Z
    assert eng.sensor_cube.active_sensor is SensorKind.LIGHT
    assert eng.rotate("sensor", SensorKind.POTENTIOMETER) is Face.POS_X
    assert eng.rotate("actuator", ActuatorKind.FAN) is Face.NEG_Z
    with pytest.raises(EngineError):
        eng.rotate("sensor", ActuatorKind.FAN)
    with pytest.raises(EngineError):
        eng.rotate("nonsense", Face.POS_X)


def test_rotating_away_from_sound_stops_the_note():
    eng = Engine(seed=0)
    events = [
        RotateEvent(0.0, "sensor", SensorKind.PIR),
        RotateEvent(0.0, "actuator", ActuatorKind.SOUND),
        StimulusEvent(0.0, SensorKind.PIR, value=1),
        RotateEvent(200.0, "actuator", ActuatorKind.FAN),
        EndEvent(400.0),
    ]
    eng.run(events)
    assert eng.actuator_cube.ctx.current_note is None


def test_stale_failover_then_recovery():
    eng = Engine(seed=5)
    events = [
        RotateEvent(0.0, "sensor", SensorKind.THERMOMETER),
        RotateEvent(0.0, "actuator", ActuatorKind.POWER_LED),
        StimulusEvent(0.0, SensorKind.THERMOMETER, value=50.0),
        SetLinkEvent(500.0, loss=1.0),
        SetLinkEvent(2000.0, loss=0.0),
        EndEvent(3000.0),
    ]
    records = eng.run(events)
    stale = [r for r in records if r.stale]
    assert len(stale) == 1  # latched after firing once
    assert stale[0].t_ms == 1500.0  # last rx 450, timeout 1000, 50 ms check grid
    assert stale[0].command == PowerLedCommand(0)
    after = [r for r in records if r.t_ms >= 2000.0]
    assert after and all(not r.stale and r.command == PowerLedCommand(255) for r in after)


def test_reordered_and_duplicate_frames_are_dropped():
    eng = Engine()
    nv = NormalizedValue(10, SensorKind.POTENTIOMETER)
    eng.inject_frame(encode(nv, seq=5))
    eng.inject_frame(encode(nv, seq=4))  # late
    eng.inject_frame(encode(nv, seq=5))  # duplicate
    eng.inject_frame(encode(NormalizedValue(11, SensorKind.POTENTIOMETER), seq=6))
    eng.step_until(0.0)
    assert [r.value for r in eng.records] == [10, 11]


def test_seq_wraparound_is_transparent():
    eng = Engine()
    nv = NormalizedValue(3, SensorKind.PIR)
    eng.inject_frame(encode(nv, seq=65535))
    eng.inject_frame(encode(nv, seq=0))
    eng.step_until(0.0)
    assert len(eng.records) == 2


def test_invalid_injected_frames_are_ignored():
    eng = Engine()
    frame = bytearray(encode(NormalizedValue(3, SensorKind.PIR), seq=1))
    frame[9] ^= 0xFF
    eng.inject_frame(bytes(frame))
    eng.step_until(0.0)
    # only the engine's own t=0 sample lands; the corrupt frame produces nothing
    assert [r.value for r in eng.records] == [0]


def test_custom_sensor_mapping_flags_frames_and_remaps_values():
    taps = []
    eng = Engine(seed=0)
    eng.frame_tap = taps.append
    events = [
        RotateEvent(0.0, "sensor", SensorKind.LIGHT),
        RotateEvent(0.0, "actuator", ActuatorKind.RING_GRAPH),
        SetMappingEvent(0.0, "sensor:light", "0..65535 => lin(0..65535 -> 0..24)"),
        StimulusEvent(0.0, SensorKind.LIGHT, value=32768.0),
        EndEvent(100.0),
    ]
    records = eng.run(events)
    # linear, not sqrt: 32768/65535*24 = 12.0002 -> 12 (sqrt would give 17)
    assert all(r.value == 12 for r in records)
    assert taps and all(decode(t).custom_mapping for t in taps)
    assert all(decode(t).value.value == 12 for t in taps)


def test_custom_sensor_mapping_out_of_band_output_is_clamped_with_warning():
    eng = Engine(seed=0)
    events = [
        RotateEvent(0.0, "sensor", SensorKind.LIGHT),
        SetMappingEvent(0.0, "sensor:light", "0..65535 => const(30)"),
        StimulusEvent(0.0, SensorKind.LIGHT, value=5.0),
        EndEvent(100.0),
    ]
    records = eng.run(events)
    assert all(r.value == 24 for r in records)
    assert all(any("clamped" in w for w in r.warnings) for r in records)


def test_custom_actuator_mapping_may_leave_the_working_band():
    eng = Engine(seed=0)
    events = [
        RotateEvent(0.0, "sensor", SensorKind.POTENTIOMETER),
        RotateEvent(0.0, "actuator", ActuatorKind.FAN),
        SetMappingEvent(0.0, "actuator:fan", "0..24 => lin(0..24 -> 0..255)"),
        StimulusEvent(0.0, SensorKind.POTENTIOMETER, value=135.0),
        EndEvent(100.0),
    ]
    records = eng.run(events)
    # value 12 -> 127.5 -> 128, below the built-in fan floor of 160
    assert all(r.command.pwm == 128 for r in records)


def test_custom_actuator_mapping_hole_falls_back_to_neutral_with_warning():
    eng = Engine(seed=0)
    events = [
        RotateEvent(0.0, "sensor", SensorKind.PIR),
        RotateEvent(0.0, "actuator", ActuatorKind.POWER_LED),
        SetMappingEvent(0.0, "actuator:power_led", "0..10 => const(200)"),
        StimulusEvent(0.0, SensorKind.PIR, value=1),  # value 24, uncovered
        EndEvent(100.0),
    ]
    records = eng.run(events)
    assert all(r.command == PowerLedCommand(0) for r in records)
    assert all(any("no case" in w for w in r.warnings) for r in records)


def test_set_mapping_rejects_broken_programs():
    eng = Engine()
    with pytest.raises(MappingSyntaxError):
        eng.set_mapping("actuator:fan", "0..24 => warble")
    with pytest.raises(MappingSemanticsError):
        eng.set_mapping("actuator:fan", "5..1 => const(0)")
    with pytest.raises(MappingSemanticsError):
        # neg then sqrt fails for every positive input
        eng.set_mapping("actuator:fan", "0..24 => neg |> sqrt")
    with pytest.raises(EngineError):
        eng.set_mapping("fan", "0..24 => const(0)")
    with pytest.raises(EngineError):
        eng.set_mapping("actuator:warp_drive", "0..24 => const(0)")
    assert eng.actuator_cube.custom_programs == {}


def test_resolve_and_validate_mapping_helpers():
    assert resolve_mapping_target("sensor:light") == ("sensor", SensorKind.LIGHT)
    assert resolve_mapping_target("actuator:fan") == ("actuator", ActuatorKind.FAN)
    program = validate_mapping("actuator:fan", "0..24 => const(0)")
    assert program.cases[0].chain[0].c == 0.0


def test_mapping_texts_reflect_custom_state():
    eng = Engine()
    texts = eng.mapping_texts()
    assert len(texts) == 12
    assert texts["actuator:fan"] == {"text": "0 => const(0); 1..24 => lin(1..24 -> 160..255)", "custom": False}
    eng.set_mapping("actuator:fan", "0..24 => const(0)")
    assert eng.mapping_texts()["actuator:fan"] == {"text": "0..24 => const(0)", "custom": True}
    eng.reset_mapping("actuator:fan")
    assert eng.mapping_texts()["actuator:fan"]["custom"] is False


def test_peltier_mode_switch_applies_mid_run():
    eng = Engine(seed=0)
    events = [
        RotateEvent(0.0, "sensor", SensorKind.PIR),
        RotateEvent(0.0, "actuator", ActuatorKind.PELTIER),
        SetPeltierModeEvent(100.0, PeltierMode.HEAT_ONLY),
        EndEvent(200.0),
    ]
    records = eng.run(events)
    # value 0 throughout: bipolar full cooling, heat-only off
    assert records[0].command == PeltierCommand(-255)
    assert records[-1].command == PeltierCommand(0)
    assert "0..255" in eng.mapping_texts()["actuator:peltier"]["text"]


def test_submit_and_step_until_drive_the_wall_clock_path():
    eng = Engine()
    eng.submit(StimulusEvent(0.0, SensorKind.PIR, value=1))
    assert eng.drain_commands() == []
    records = eng.step_until(60.0)
    assert [r.value for r in records] == [24, 24]
    assert eng.t_ms == 60.0
    # a bad command surfaces as an error, not an exception
    eng.submit(SetMappingEvent(0.0, "actuator:fan", "1..0 => const(1)"))
    errors = eng.drain_commands()
    assert len(errors) == 1 and isinstance(errors[0], MappingSemanticsError)


def test_raw_hint_carries_scaled_raw_readings():
    taps = []
    eng = Engine(seed=0)
    eng.frame_tap = taps.append
    events = [
        RotateEvent(0.0, "sensor", SensorKind.THERMOMETER),
        StimulusEvent(0.0, SensorKind.THERMOMETER, value=25.0),
        EndEvent(60.0),
    ]
    eng.run(events)
    hints = [decode(t).raw_hint for t in taps]
    assert hints and all(h == 2500 for h in hints)  # centi-degrees


def test_no_echo_raw_hint_is_absent():
    taps = []
    eng = Engine(seed=0)
    eng.frame_tap = taps.append
    events = [
        RotateEvent(0.0, "sensor", SensorKind.DISTANCE),
        EndEvent(60.0),
    ]
    eng.run(events)  # distance stimulus defaults to NoEcho
    assert taps and all(decode(t).raw_hint is None for t in taps)
    assert all(decode(t).value.value == 0 for t in taps)
