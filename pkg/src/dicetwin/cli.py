"""Command line entry points.

    dicetwin run --scenario s.jsonl --trace out.jsonl --seed 7
    dicetwin map check custom.map --target fan
    dicetwin map eval custom.map --input 12
    dicetwin map defaults --target vibration
    dicetwin serve --port 8080

Exit codes: 0 ok, 1 mapping error, 2 scenario/config validation error,
64 bad flags, 74 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Union

from .actuators import PeltierMode
from .config import ConfigError, SimConfig, load_config
from .engine import Engine
from .link import LinkConditions
from .mapdsl import (
    ACTUATOR_CHECK_DOMAIN,
    MappingError,
    SENSOR_CHECK_DOMAIN,
    check_range,
    default_program_text,
    eval_program,
    parse,
)
from .model import ActuatorKind, SensorKind
from .scenario import ScenarioError, load_scenario, write_trace

EX_OK = 0
EX_ERROR = 1
EX_VALIDATION = 2
EX_USAGE = 64
EX_IO = 74


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must be in [0, 1], got {text}")
    return value


def _non_negative(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"must fit in 64 bits, got {text}")
    return value


def build_parser() -> _Parser:
    parser = _Parser(prog="dicetwin", description="Software twin of the two-cube sensor/actuator dice.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario headlessly and write a trace")
    run.add_argument("--scenario", required=True, help="scenario JSONL file")
    run.add_argument("--trace", required=True, help="output trace JSONL file, or - for stdout")
    run.add_argument("--seed", type=_seed, default=0, help="link PRNG seed (default 0)")
    run.add_argument("--loss", type=_probability, default=0.0, help="frame drop probability")
    run.add_argument("--latency-ms", type=_non_negative, default=0.0, help="base link latency")
    run.add_argument("--jitter-ms", type=_non_negative, default=0.0, help="uniform latency jitter")
    run.add_argument("--config", help="simulator config file")

    map_cmd = sub.add_parser("map", help="mapping program utilities")
    map_sub = map_cmd.add_subparsers(dest="map_command", required=True)

    check = map_sub.add_parser("check", help="parse and range-check a program")
    check.add_argument("file", help="program file")
    check.add_argument("--target", help="sensor/actuator kind giving the input domain (default 0..24)")

    ev = map_sub.add_parser("eval", help="evaluate a program at one input")
    ev.add_argument("file", help="program file")
    ev.add_argument("--input", type=float, required=True, help="input value")

    defaults = map_sub.add_parser("defaults", help="print a built-in mapping as DSL text")
    defaults.add_argument("--target", required=True, help="sensor or actuator kind")
    defaults.add_argument(
        "--peltier-mode",
        choices=[m.value for m in PeltierMode],
        default=PeltierMode.BIPOLAR.value,
        help="which peltier default to print",
    )

    serve = sub.add_parser("serve", help="serve the live simulation over HTTP/WebSocket")
    serve.add_argument("--port", type=int, default=8080)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--seed", type=_seed, default=0)
    serve.add_argument("--config", help="simulator config file")
    serve.add_argument("--loss", type=_probability, default=0.0)
    serve.add_argument("--latency-ms", type=_non_negative, default=0.0)
    serve.add_argument("--jitter-ms", type=_non_negative, default=0.0)
    serve.add_argument("--udp-tx", metavar="HOST:PORT", help="carry frames out as UDP datagrams")
    serve.add_argument("--udp-rx", metavar="PORT", type=int, help="feed the actuator cube from UDP")

    return parser


def _load_config(path: Optional[str]) -> SimConfig:
    try:
        return load_config(path)
    except OSError as exc:
        raise _Exit(EX_IO, f"cannot read config: {exc}") from exc
    except ConfigError as exc:
        raise _Exit(EX_VALIDATION, f"config error: {exc}") from exc


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _resolve_kind(name: str) -> Union[SensorKind, ActuatorKind]:
    raw = name.partition(":")[2] if ":" in name else name
    for enum_cls in (SensorKind, ActuatorKind):
        try:
            return enum_cls(raw)
        except ValueError:
            continue
    raise _Exit(EX_USAGE, f"unknown sensor or actuator kind {name!r}")


def cmd_run(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    try:
        events = load_scenario(args.scenario)
    except OSError as exc:
        raise _Exit(EX_IO, f"cannot read scenario: {exc}") from exc
    except ScenarioError as exc:
        raise _Exit(EX_VALIDATION, f"scenario error: {exc}") from exc
    engine = Engine(
        config,
        seed=args.seed,
        link=LinkConditions(args.loss, args.latency_ms, args.jitter_ms),
    )
    records = engine.run(events)
    try:
        if args.trace == "-":
            write_trace(records, sys.stdout)
        else:
            with open(args.trace, "w", encoding="utf-8") as out:
                write_trace(records, out)
    except OSError as exc:
        raise _Exit(EX_IO, f"cannot write trace: {exc}") from exc
    return EX_OK


def _read_program(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _Exit(EX_IO, f"cannot read program: {exc}") from exc


def cmd_map_check(args: argparse.Namespace) -> int:
    text = _read_program(args.file)
    try:
        program = parse(text)
    except MappingError as exc:
        print(f"error: {exc}")
        return EX_ERROR
    if args.target is not None:
        kind = _resolve_kind(args.target)
        domain, step = (
            SENSOR_CHECK_DOMAIN[kind] if isinstance(kind, SensorKind) else ACTUATOR_CHECK_DOMAIN
        )
    else:
        domain, step = ACTUATOR_CHECK_DOMAIN
    report = check_range(program, domain, step)
    print(f"input domain {domain[0]:g}..{domain[1]:g} step {step:g}")
    if report.min_out is not None:
        print(f"output range {report.min_out}..{report.max_out}")
    if report.uncovered_inputs:
        shown = ", ".join(f"{x:g}" for x in report.uncovered_inputs[:5])
        print(f"warning: {len(report.uncovered_inputs)} uncovered inputs (first: {shown})")
    if report.domain_error_inputs:
        shown = ", ".join(f"{x:g}" for x in report.domain_error_inputs[:5])
        print(f"error: stage domain errors at {len(report.domain_error_inputs)} inputs (first: {shown})")
        return EX_ERROR
    print("ok")
    return EX_OK


def cmd_map_eval(args: argparse.Namespace) -> int:
    text = _read_program(args.file)
    try:
        program = parse(text)
        print(eval_program(program, args.input))
    except MappingError as exc:
        print(f"error: {exc}")
        return EX_ERROR
    return EX_OK


def cmd_map_defaults(args: argparse.Namespace) -> int:
    kind = _resolve_kind(args.target)
    print(default_program_text(kind, PeltierMode(args.peltier_mode)))
    return EX_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import ServerRuntime, create_app
    from .udp import UdpFrameReceiver, UdpFrameSender, parse_endpoint

    config = _load_config(args.config)
    engine = Engine(
        config,
        seed=args.seed,
        link=LinkConditions(args.loss, args.latency_ms, args.jitter_ms),
    )
    runtime = ServerRuntime(engine)
    sender = None
    receiver = None
    if args.udp_tx:
        try:
            host, port = parse_endpoint(args.udp_tx)
        except ValueError as exc:
            raise _Exit(EX_USAGE, str(exc)) from exc
        sender = UdpFrameSender(host, port)
        engine.frame_tap = sender
        engine.loopback = False
    if args.udp_rx:
        receiver = UdpFrameReceiver(args.udp_rx, runtime.inject_frame)
        receiver.start()
    app = create_app(runtime)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    finally:
        if receiver is not None:
            receiver.close()
        if sender is not None:
            sender.close()
    return EX_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "map":
            if args.map_command == "check":
                return cmd_map_check(args)
            if args.map_command == "eval":
                return cmd_map_eval(args)
            return cmd_map_defaults(args)
        return cmd_serve(args)
    except _Exit as exc:
        print(f"dicetwin: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
