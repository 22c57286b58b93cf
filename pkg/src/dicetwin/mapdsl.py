"""A small textual language for sketching value mappings.

A program is an ordered list of input-range cases, each applying a chain of
scalar stages. The first case whose range contains the input wins. Arithmetic
runs on doubles; only the final result is rounded (half away from zero).

    0 => const(0); 1..24 => lin(1..24 -> 64..255)      # off below the band
    0..24 => sq |> lin(0..576 -> 0..255)               # square-law brightness

Grammar (whitespace-insensitive, '#' comments to end of line):

    program := case (";" case)* [";"]
    case    := range "=>" chain
    range   := NUM [".." NUM]
    chain   := stage ("|>" stage)*
    stage   := "const" "(" NUM ")"
             | "lin" "(" NUM ".." NUM "->" NUM ".." NUM ")"
             | "sqrt" | "sq" | "neg"
             | "clamp" "(" NUM "," NUM ")"
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

from .actuators import PeltierMode
from .model import ActuatorKind, DiceError, SensorKind, round_half_away


class MappingError(DiceError):
    """Base for parse/eval problems in mapping programs."""


class MappingSyntaxError(MappingError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class MappingSemanticsError(MappingError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        where = f"{line}:{col}: " if line else ""
        super().__init__(f"{where}{message}")
        self.line = line
        self.col = col


class NoMatchingCase(MappingError):
    def __init__(self, x: float):
        super().__init__(f"no case covers input {x}")
        self.x = x


class EvalDomainError(MappingError):
    """A stage was applied outside its domain (sqrt of a negative)."""


# --- AST ---------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    c: float


@dataclass(frozen=True)
class Lin:
    in_lo: float
    in_hi: float
    out_lo: float
    out_hi: float


@dataclass(frozen=True)
class Sqrt:
    pass


@dataclass(frozen=True)
class Sq:
    pass


@dataclass(frozen=True)
class Neg:
    pass


@dataclass(frozen=True)
class Clamp:
    lo: float
    hi: float


Stage = Union[Const, Lin, Sqrt, Sq, Neg, Clamp]


@dataclass(frozen=True)
class Case:
    lo: float
    hi: float
    chain: Tuple[Stage, ...]

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi


@dataclass(frozen=True)
class MappingProgram:
    cases: Tuple[Case, ...]


# --- tokenizer ---------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<arrow>=>)
  | (?P<pipe>\|>)
  | (?P<to>->)
  | (?P<dots>\.\.)
  | (?P<num>-?(?:\d+\.\d+|\d+|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<punct>[();,])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # num | ident | punct | arrow | pipe | to | dots | eof
    text: str
    line: int
    col: int


def _tokenize(text: str) -> List[_Token]:
    tokens: List[_Token] = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise MappingSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind == "nl":
            line += 1
            col = 1
        elif kind in ("ws", "comment"):
            col += len(value)
        else:
            tokens.append(_Token(kind, value, line, col))
            col += len(value)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


# --- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: List[_Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, text: Optional[str] = None) -> _Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text if text is not None else kind
            got = tok.text if tok.kind != "eof" else "end of input"
            raise MappingSyntaxError(f"expected {want!r}, got {got!r}", tok.line, tok.col)
        return self.next()

    def number(self) -> Tuple[float, _Token]:
        tok = self.expect("num")
        return float(tok.text), tok

    def parse_program(self) -> MappingProgram:
        cases = [self.parse_case()]
        while self.peek().kind == "punct" and self.peek().text == ";":
            self.next()
            if self.peek().kind == "eof":  # trailing semicolon
                break
            cases.append(self.parse_case())
        tok = self.peek()
        if tok.kind != "eof":
            raise MappingSyntaxError(f"expected ';' or end of input, got {tok.text!r}", tok.line, tok.col)
        return MappingProgram(tuple(cases))

    def parse_case(self) -> Case:
        lo, lo_tok = self.number()
        hi = lo
        if self.peek().kind == "dots":
            self.next()
            hi, _ = self.number()
        if lo > hi:
            raise MappingSemanticsError(f"inverted range {_fmt(lo)}..{_fmt(hi)}", lo_tok.line, lo_tok.col)
        self.expect("arrow")
        chain = [self.parse_stage()]
        while self.peek().kind == "pipe":
            self.next()
            chain.append(self.parse_stage())
        return Case(lo, hi, tuple(chain))

    def parse_stage(self) -> Stage:
        tok = self.peek()
        if tok.kind != "ident":
            got = tok.text if tok.kind != "eof" else "end of input"
            raise MappingSyntaxError(f"expected a stage name, got {got!r}", tok.line, tok.col)
        self.next()
        name = tok.text
        if name == "const":
            self.expect("punct", "(")
            c, _ = self.number()
            self.expect("punct", ")")
            return Const(c)
        if name == "lin":
            self.expect("punct", "(")
            in_lo, in_tok = self.number()
            self.expect("dots")
            in_hi, _ = self.number()
            self.expect("to")
            out_lo, _ = self.number()
            self.expect("dots")
            out_hi, _ = self.number()
            self.expect("punct", ")")
            if in_lo == in_hi:
                raise MappingSemanticsError("lin input range must not be empty", in_tok.line, in_tok.col)
            return Lin(in_lo, in_hi, out_lo, out_hi)
        if name == "sqrt":
            return Sqrt()
        if name == "sq":
            return Sq()
        if name == "neg":
            return Neg()
        if name == "clamp":
            self.expect("punct", "(")
            lo, lo_tok = self.number()
            self.expect("punct", ",")
            hi, _ = self.number()
            self.expect("punct", ")")
            if lo > hi:
                raise MappingSemanticsError(f"clamp bounds inverted: {_fmt(lo)} > {_fmt(hi)}", lo_tok.line, lo_tok.col)
            return Clamp(lo, hi)
        raise MappingSyntaxError(f"unknown stage {name!r}", tok.line, tok.col)


def parse(text: str) -> MappingProgram:
    """Parse program text; raises MappingSyntaxError / MappingSemanticsError."""
    tokens = _tokenize(text)
    if tokens[0].kind == "eof":
        raise MappingSemanticsError("empty program", tokens[0].line, tokens[0].col)
    return _Parser(tokens).parse_program()


# --- printer -----------------------------------------------------------------


def _fmt(x: float) -> str:
    if math.isfinite(x) and x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _stage_text(s: Stage) -> str:
    if isinstance(s, Const):
        return f"const({_fmt(s.c)})"
    if isinstance(s, Lin):
        return f"lin({_fmt(s.in_lo)}..{_fmt(s.in_hi)} -> {_fmt(s.out_lo)}..{_fmt(s.out_hi)})"
    if isinstance(s, Sqrt):
        return "sqrt"
    if isinstance(s, Sq):
        return "sq"
    if isinstance(s, Neg):
        return "neg"
    if isinstance(s, Clamp):
        return f"clamp({_fmt(s.lo)}, {_fmt(s.hi)})"
    raise TypeError(f"unknown stage {s!r}")


def to_text(p: MappingProgram) -> str:
    """Canonical program text; parse(to_text(p)) == p."""
    parts = []
    for case in p.cases:
        rng = _fmt(case.lo) if case.lo == case.hi else f"{_fmt(case.lo)}..{_fmt(case.hi)}"
        parts.append(f"{rng} => " + " |> ".join(_stage_text(s) for s in case.chain))
    return "; ".join(parts)


# --- evaluator ---------------------------------------------------------------


def _apply(stage: Stage, v: float) -> float:
    if isinstance(stage, Const):
        return stage.c
    if isinstance(stage, Lin):
        return stage.out_lo + (v - stage.in_lo) * (stage.out_hi - stage.out_lo) / (stage.in_hi - stage.in_lo)
    if isinstance(stage, Sqrt):
        if v < 0:
            raise EvalDomainError(f"sqrt of negative value {v}")
        return math.sqrt(v)
    if isinstance(stage, Sq):
        return v * v
    if isinstance(stage, Neg):
        return -v
    if isinstance(stage, Clamp):
        return stage.lo if v < stage.lo else stage.hi if v > stage.hi else v
    raise TypeError(f"unknown stage {stage!r}")


def eval_program(p: MappingProgram, x: float) -> int:
    """Evaluate at x: first matching case, chain left to right, round at the end."""
    for case in p.cases:
        if case.contains(x):
            v = float(x)
            for stage in case.chain:
                v = _apply(stage, v)
            return round_half_away(v)
    raise NoMatchingCase(x)


@dataclass(frozen=True)
class RangeReport:
    min_out: Optional[int]
    max_out: Optional[int]
    uncovered_inputs: Tuple[float, ...]
    domain_error_inputs: Tuple[float, ...]

    @property
    def clean(self) -> bool:
        return not self.uncovered_inputs and not self.domain_error_inputs


def check_range(p: MappingProgram, domain: Tuple[float, float], step: float) -> RangeReport:
    """Sample the domain and report output extrema and inputs no case covers."""
    if step <= 0:
        raise ValueError("step must be positive")
    lo, hi = domain
    n = int(math.floor((hi - lo) / step + 1e-9))
    points = [lo + i * step for i in range(n + 1)]
    if points[-1] < hi - 1e-9:
        points.append(hi)
    min_out: Optional[int] = None
    max_out: Optional[int] = None
    uncovered: List[float] = []
    domain_errors: List[float] = []
    for x in points:
        try:
            y = eval_program(p, x)
        except NoMatchingCase:
            uncovered.append(x)
            continue
        except EvalDomainError:
            domain_errors.append(x)
            continue
        min_out = y if min_out is None else min(min_out, y)
        max_out = y if max_out is None else max(max_out, y)
    return RangeReport(min_out, max_out, tuple(uncovered), tuple(domain_errors))


# --- built-in defaults -------------------------------------------------------

SENSOR_DEFAULT_TEXT = {
    SensorKind.POTENTIOMETER: "0..1023 => lin(0..1023 -> 0..24)",
    SensorKind.THERMOMETER: "0..50 => lin(0..50 -> 0..24)",
    SensorKind.MICROPHONE: "0..1023 => lin(0..1023 -> 0..24)",
    SensorKind.DISTANCE: "0..0.5 => const(0); 0.5..72 => clamp(1, 72) |> lin(1..72 -> 1..24)",
    SensorKind.PIR: "0 => const(0); 1..1 => const(24)",
    SensorKind.LIGHT: "0..65535 => sqrt |> clamp(0, 256) |> lin(0..256 -> 0..24)",
}

ACTUATOR_DEFAULT_TEXT = {
    ActuatorKind.RING_GRAPH: "0..24 => lin(0..24 -> 0..24)",
    ActuatorKind.POWER_LED: "0..24 => sq |> lin(0..576 -> 0..255)",
    ActuatorKind.SOUND: "0 => const(0); 1..24 => lin(1..24 -> 51..74)",
    ActuatorKind.VIBRATION: "0 => const(0); 1..24 => lin(1..24 -> 64..255)",
    ActuatorKind.FAN: "0 => const(0); 1..24 => lin(1..24 -> 160..255)",
}

PELTIER_DEFAULT_TEXT = {
    PeltierMode.BIPOLAR: "0..24 => lin(0..24 -> -255..255)",
    PeltierMode.HEAT_ONLY: "0..24 => lin(0..24 -> 0..255)",
}

#: Input domain and check step per sensor, for range-checking sketched programs.
SENSOR_CHECK_DOMAIN = {
    SensorKind.POTENTIOMETER: ((0.0, 1023.0), 1.0),
    SensorKind.THERMOMETER: ((0.0, 50.0), 0.1),
    SensorKind.MICROPHONE: ((0.0, 1023.0), 1.0),
    SensorKind.DISTANCE: ((0.0, 72.0), 0.5),
    SensorKind.PIR: ((0.0, 1.0), 1.0),
    SensorKind.LIGHT: ((0.0, 65535.0), 257.0),
}

ACTUATOR_CHECK_DOMAIN = ((0.0, 24.0), 1.0)


def default_program_text(
    kind: Union[SensorKind, ActuatorKind], peltier_mode: PeltierMode = PeltierMode.BIPOLAR
) -> str:
    if isinstance(kind, SensorKind):
        return SENSOR_DEFAULT_TEXT[kind]
    if kind is ActuatorKind.PELTIER:
        return PELTIER_DEFAULT_TEXT[peltier_mode]
    return ACTUATOR_DEFAULT_TEXT[kind]


def default_program(
    kind: Union[SensorKind, ActuatorKind], peltier_mode: PeltierMode = PeltierMode.BIPOLAR
) -> MappingProgram:
    """The built-in mapping for a sensor or actuator, in DSL form."""
    return parse(default_program_text(kind, peltier_mode))
