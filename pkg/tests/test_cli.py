import json

import pytest

from dicetwin.cli import EX_ERROR, EX_IO, EX_OK, EX_USAGE, EX_VALIDATION, main

GOOD_SCENARIO = """\
{"t_ms": 0, "event": "rotate", "cube": "sensor", "top": "thermometer"}
{"t_ms": 0, "event": "rotate", "cube": "actuator", "top": "power_led"}
{"t_ms": 0, "event": "stimulus", "sensor": "thermometer", "value": 50.0}
{"t_ms": 500, "event": "end"}
"""


def write_scenario(tmp_path, text=GOOD_SCENARIO, name="s.jsonl"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_run_writes_a_trace_file(tmp_path):
    scenario = write_scenario(tmp_path)
    trace = tmp_path / "out.jsonl"
    assert main(["run", "--scenario", scenario, "--trace", str(trace)]) == EX_OK
    lines = trace.read_text().splitlines()
    header = json.loads(lines[0])
    assert header["format"] == "dice-trace"
    records = [json.loads(line) for line in lines[1:]]
    assert len(records) == 10
    assert all(r["command"] == {"type": "power_led", "brightness": 255} for r in records)


def test_run_trace_to_stdout(tmp_path, capsys):
    scenario = write_scenario(tmp_path)
    assert main(["run", "--scenario", scenario, "--trace", "-"]) == EX_OK
    out = capsys.readouterr().out
    assert out.count("\n") == 11
    assert '"format": "dice-trace"' in out


def test_run_is_deterministic_for_a_seed(tmp_path):
    scenario = write_scenario(tmp_path)
    t1, t2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    common = ["run", "--scenario", scenario, "--seed", "7", "--loss", "0.3", "--jitter-ms", "5"]
    assert main(common + ["--trace", str(t1)]) == EX_OK
    assert main(common + ["--trace", str(t2)]) == EX_OK
    assert t1.read_bytes() == t2.read_bytes()


def test_run_rejects_bad_scenario_with_validation_exit(tmp_path, capsys):
    scenario = write_scenario(tmp_path, '{"t_ms": 0, "event": "stimulus", "sensor": "thermometer"}\n')
    assert main(["run", "--scenario", scenario, "--trace", "-"]) == EX_VALIDATION
    assert "line 1" in capsys.readouterr().err


def test_run_missing_scenario_file_is_an_io_error(tmp_path, capsys):
    assert main(["run", "--scenario", str(tmp_path / "nope.jsonl"), "--trace", "-"]) == EX_IO
    assert capsys.readouterr().err


def test_run_bad_config_is_a_validation_error(tmp_path, capsys):
    scenario = write_scenario(tmp_path)
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("face.sensor.pos_x = warp_core\n")
    code = main(["run", "--scenario", scenario, "--trace", "-", "--config", str(cfg)])
    assert code == EX_VALIDATION
    assert "line 1" in capsys.readouterr().err


def test_usage_errors_exit_64(tmp_path):
    scenario = write_scenario(tmp_path)
    with pytest.raises(SystemExit) as exc:
        main(["run", "--scenario", scenario, "--trace", "-", "--loss", "1.5"])
    assert exc.value.code == EX_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EX_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["run"])
    assert exc.value.code == EX_USAGE


def test_map_check_accepts_a_clean_program(tmp_path, capsys):
    path = tmp_path / "m.map"
    path.write_text("0..24 => lin(0..24 -> 0..255)\n")
    assert main(["map", "check", str(path), "--target", "actuator:fan"]) == EX_OK
    out = capsys.readouterr().out
    assert "ok" in out and "0" in out and "255" in out


def test_map_check_reports_syntax_error_position(tmp_path, capsys):
    path = tmp_path / "m.map"
    path.write_text("0..24 => warble\n")
    assert main(["map", "check", str(path), "--target", "actuator:fan"]) == EX_ERROR
    assert "1:10" in capsys.readouterr().out


def test_map_check_flags_domain_errors(tmp_path, capsys):
    path = tmp_path / "m.map"
    path.write_text("0..24 => neg |> sqrt\n")
    assert main(["map", "check", str(path), "--target", "actuator:fan"]) == EX_ERROR
    assert "domain error" in capsys.readouterr().out


def test_map_check_warns_about_holes_but_passes(tmp_path, capsys):
    path = tmp_path / "m.map"
    path.write_text("0..10 => const(1)\n")
    assert main(["map", "check", str(path), "--target", "actuator:fan"]) == EX_OK
    out = capsys.readouterr().out
    assert "uncovered" in out


def test_map_eval_prints_the_rounded_output(tmp_path, capsys):
    path = tmp_path / "m.map"
    path.write_text("0..24 => lin(0..24 -> 0..255)")
    assert main(["map", "eval", str(path), "--input", "12"]) == EX_OK
    assert capsys.readouterr().out.strip() == "128"


def test_map_eval_reports_no_matching_case(tmp_path, capsys):
    path = tmp_path / "m.map"
    path.write_text("0..10 => const(1)")
    assert main(["map", "eval", str(path), "--input", "15"]) == EX_ERROR
    assert "no case" in capsys.readouterr().out


def test_map_defaults_prints_known_programs(capsys):
    assert main(["map", "defaults", "--target", "actuator:power_led"]) == EX_OK
    assert capsys.readouterr().out.strip() == "0..24 => sq |> lin(0..576 -> 0..255)"
    assert main(["map", "defaults", "--target", "actuator:peltier", "--peltier-mode", "heat_only"]) == EX_OK
    assert capsys.readouterr().out.strip() == "0..24 => lin(0..24 -> 0..255)"
    assert main(["map", "defaults", "--target", "light"]) == EX_OK
    assert "sqrt" in capsys.readouterr().out


def test_map_defaults_rejects_unknown_target(capsys):
    assert main(["map", "defaults", "--target", "actuator:warp_drive"]) == EX_USAGE
    assert capsys.readouterr().err
