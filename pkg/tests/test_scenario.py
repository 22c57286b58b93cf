import json

import pytest

from dicetwin.actuators import PeltierMode
from dicetwin.model import (
    ActuatorKind,
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
from dicetwin.scenario import (
    EndEvent,
    RotateEvent,
    ScenarioError,
    SetLinkEvent,
    SetMappingEvent,
    SetPeltierModeEvent,
    StimulusEvent,
    TraceRecord,
    command_to_json,
    parse_scenario,
    record_to_json,
    trace_text,
)
from dicetwin.sensors import SineWave


def lines(*objs):
    return "\n".join(json.dumps(o) for o in objs)


def test_parse_full_event_set():
    text = lines(
        {"format": "dice-scenario", "v": 1},
        {"t_ms": 0, "event": "rotate", "cube": "sensor", "top": "thermometer"},
        {"t_ms": 0, "event": "rotate", "cube": "actuator", "top": "neg_x"},
        {"t_ms": 10, "event": "stimulus", "sensor": "thermometer", "value": 50.0},
        {"t_ms": 20, "event": "stimulus", "sensor": "microphone", "waveform": {"type": "sine", "freq_hz": 100, "amplitude": 300, "dc": 500}},
        {"t_ms": 30, "event": "stimulus", "sensor": "distance", "value": None},
        {"t_ms": 40, "event": "set_link", "loss": 0.5, "latency_ms": 30, "jitter_ms": 5},
        {"t_ms": 50, "event": "set_mapping", "target": "actuator:fan", "program": "0..24 => const(0)"},
        {"t_ms": 60, "event": "set_peltier_mode", "mode": "heat_only"},
        {"t_ms": 100, "event": "end"},
    )
    events = parse_scenario(text)
    assert events[0] == RotateEvent(0.0, "sensor", SensorKind.THERMOMETER)
    assert events[1] == RotateEvent(0.0, "actuator", Face.NEG_X)
    assert events[2] == StimulusEvent(10.0, SensorKind.THERMOMETER, value=50.0)
    assert events[3] == StimulusEvent(
        20.0, SensorKind.MICROPHONE, waveform=SineWave(100.0, 300.0, 500.0)
    )
    assert events[4] == StimulusEvent(30.0, SensorKind.DISTANCE, value=None)
    assert events[5] == SetLinkEvent(40.0, loss=0.5, latency_ms=30.0, jitter_ms=5.0)
    assert events[6] == SetMappingEvent(50.0, "actuator:fan", "0..24 => const(0)")
    assert events[7] == SetPeltierModeEvent(60.0, PeltierMode.HEAT_ONLY)
    assert events[8] == EndEvent(100.0)


def test_header_is_optional_but_validated():
    body = lines({"t_ms": 0, "event": "end"})
    assert parse_scenario(body) == [EndEvent(0.0)]
    with pytest.raises(ScenarioError) as err:
        parse_scenario(lines({"format": "weird", "v": 1}, {"t_ms": 0, "event": "end"}))
    assert "unknown format" in str(err.value)
    with pytest.raises(ScenarioError):
        parse_scenario(lines({"format": "dice-scenario", "v": 2}, {"t_ms": 0, "event": "end"}))


def test_validation_errors_carry_line_numbers():
    cases = [
        (lines({"t_ms": 0, "event": "warp"}, {"t_ms": 1, "event": "end"}), "line 1"),
        (lines({"event": "end"}), "line 1"),
        (lines({"t_ms": -1, "event": "end"}), "line 1"),
        ("not json\n", "line 1"),
        (
            lines(
                {"t_ms": 5, "event": "stimulus", "sensor": "thermometer", "value": 1},
                {"t_ms": 1, "event": "end"},
            ),
            "line 2",
        ),
    ]
    for text, expected in cases:
        with pytest.raises(ScenarioError) as err:
            parse_scenario(text)
        assert expected in str(err.value), text


def test_waveform_and_no_echo_are_sensor_specific():
    with pytest.raises(ScenarioError) as err:
        parse_scenario(
            lines(
                {"t_ms": 0, "event": "stimulus", "sensor": "light", "waveform": {"type": "sine"}},
                {"t_ms": 1, "event": "end"},
            )
        )
    assert "microphone" in str(err.value)
    with pytest.raises(ScenarioError) as err:
        parse_scenario(
            lines(
                {"t_ms": 0, "event": "stimulus", "sensor": "pir", "value": None},
                {"t_ms": 1, "event": "end"},
            )
        )
    assert "distance" in str(err.value)
    # "no_echo" spelled out is the same as null
    events = parse_scenario(
        lines(
            {"t_ms": 0, "event": "stimulus", "sensor": "distance", "value": "no_echo"},
            {"t_ms": 1, "event": "end"},
        )
    )
    assert events[0].value is None


def test_scenario_must_end_exactly_once():
    with pytest.raises(ScenarioError) as err:
        parse_scenario(lines({"t_ms": 0, "event": "rotate", "cube": "sensor", "top": "pir"}))
    assert "end" in str(err.value)
    with pytest.raises(ScenarioError) as err:
        parse_scenario(
            lines(
                {"t_ms": 0, "event": "end"},
                {"t_ms": 1, "event": "end"},
            )
        )
    assert "after end" in str(err.value)


def test_set_link_bounds_checked_at_parse_time():
    with pytest.raises(ScenarioError):
        parse_scenario(lines({"t_ms": 0, "event": "set_link", "loss": 1.5}, {"t_ms": 1, "event": "end"}))
    with pytest.raises(ScenarioError):
        parse_scenario(
            lines({"t_ms": 0, "event": "set_link", "latency_ms": -1}, {"t_ms": 1, "event": "end"})
        )


def test_command_to_json_shapes():
    assert command_to_json(RingGraphCommand(12, (255, 0, 0), 64)) == {
        "type": "ring_graph",
        "lit_count": 12,
        "color": [255, 0, 0],
        "per_pixel_brightness": 64,
    }
    assert command_to_json(PowerLedCommand(255)) == {"type": "power_led", "brightness": 255}
    assert command_to_json(SoundCommand((NoteOff(62), NoteOn(74, 100)))) == {
        "type": "sound",
        "events": [
            {"type": "note_off", "note": 62},
            {"type": "note_on", "note": 74, "velocity": 100},
        ],
    }
    assert command_to_json(PeltierCommand(-128)) == {"type": "peltier", "pwm": -128}
    assert command_to_json(VibrationCommand(155)) == {"type": "vibration", "pwm": 155}
    assert command_to_json(FanCommand(205)) == {"type": "fan", "pwm": 205}


def make_record(**overrides):
    base = dict(
        t_ms=100.0,
        active_sensor=SensorKind.THERMOMETER,
        active_actuator=ActuatorKind.POWER_LED,
        value=24,
        command=PowerLedCommand(255),
        link_sent=3,
        link_delivered=2,
        link_dropped=1,
    )
    base.update(overrides)
    return TraceRecord(**base)


def test_record_json_omits_quiet_flags():
    rec = make_record()
    obj = record_to_json(rec)
    assert obj == {
        "t_ms": 100.0,
        "active_sensor": "thermometer",
        "active_actuator": "power_led",
        "value": 24,
        "command": {"type": "power_led", "brightness": 255},
        "link": {"sent": 3, "delivered": 2, "dropped": 1},
    }
    noisy = record_to_json(make_record(stale=True, warnings=("w",)))
    assert noisy["stale"] is True
    assert noisy["warnings"] == ["w"]


def test_trace_text_has_versioned_header():
    text = trace_text([make_record()])
    first, second = text.strip().split("\n")
    assert json.loads(first) == {"format": "dice-trace", "v": 1}
    assert json.loads(second)["value"] == 24
