"""Sensor side: simulated stimuli, raw sampling, and normalization to 0..24.

Each sensor reduces its raw reading to the shared intermediate value. All
normalizations round half away from zero and clamp out-of-domain raw inputs
to the domain first (NoEcho on the ranger stays distinct and maps to 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

from .model import DiceError, NormalizedValue, SensorKind, clamp, round_half_away

#: Common sampling period; the microphone consumes one full window per tick.
DEFAULT_SAMPLING_PERIOD_MS = 50.0

#: Microphone window length and internal sampling rate of the waveform source.
MIC_WINDOW_MS = 50.0
MIC_SAMPLE_RATE_HZ = 8000


class EmptyWindow(DiceError):
    """Microphone normalization needs at least one sample."""


# Scale factors are written in the same shape as the DSL `lin` stage
# (out_lo + (x - in_lo) * span_out / span_in) so both sides agree bit for bit.


def normalize_potentiometer(raw: float) -> int:
    """AD counts 0..1023 (full 270 deg dial) -> 0..24, linear."""
    raw = clamp(raw, 0, 1023)
    return round_half_away(raw * 24 / 1023)


def normalize_thermometer(t_c: float) -> int:
    """Temperature 0..50 degC -> 0..24, linear."""
    t_c = clamp(t_c, 0, 50)
    return round_half_away(t_c * 24 / 50)


def window_amplitude(window: Sequence[float]) -> float:
    if len(window) == 0:
        raise EmptyWindow("microphone window must contain at least one sample")
    return max(window) - min(window)


def normalize_microphone(window: Sequence[float]) -> int:
    """Max-min swing of one 50 ms window of AD samples -> 0..24."""
    amp = clamp(window_amplitude(window), 0, 1023)
    return round_half_away(amp * 24 / 1023)


#: Readings below this many cm count as "no target", like a missing echo.
DISTANCE_CUTOFF_CM = 0.5

NO_ECHO = None  # distance reading with no return echo


def normalize_distance(d_cm: Optional[float]) -> int:
    """NoEcho or <0.5 cm -> 0; 1..72 cm -> 1..24, linear (clamped)."""
    if d_cm is NO_ECHO or d_cm < DISTANCE_CUTOFF_CM:
        return 0
    d = clamp(d_cm, 1, 72)
    return round_half_away(1 + (d - 1) * 23 / 71)


def normalize_pir(motion: Union[int, bool]) -> int:
    """Binary: no motion -> 0, motion -> 24."""
    return 24 if motion else 0


def normalize_light(lux: float) -> int:
    """Illuminance 0..65535 lx -> sqrt -> 0..24."""
    lux = clamp(lux, 0, 65535)
    return round_half_away(min(math.sqrt(lux), 256.0) * 24 / 256)


NORMALIZERS = {
    SensorKind.POTENTIOMETER: normalize_potentiometer,
    SensorKind.THERMOMETER: normalize_thermometer,
    SensorKind.MICROPHONE: normalize_microphone,
    SensorKind.DISTANCE: normalize_distance,
    SensorKind.PIR: normalize_pir,
    SensorKind.LIGHT: normalize_light,
}


@dataclass(frozen=True)
class RawSample:
    """One raw reading in the sensor's physical units, with its timestamp."""

    sensor: SensorKind
    value: float  # for the microphone: the window's max-min amplitude
    t_ms: float


# --- stimulus state ----------------------------------------------------------


@dataclass(frozen=True)
class ConstantWave:
    """Flat waveform at a fixed AD level (0 = silence)."""

    level: float = 0.0

    def window(self, t0_ms: float, n_samples: int) -> List[int]:
        v = int(round_half_away(clamp(self.level, 0, 1023)))
        return [v] * n_samples


@dataclass(frozen=True)
class SineWave:
    """Sine test tone in AD counts: dc + amplitude * sin(2*pi*f*t)."""

    freq_hz: float = 440.0
    amplitude: float = 300.0
    dc: float = 512.0

    def window(self, t0_ms: float, n_samples: int) -> List[int]:
        out = []
        w = 2.0 * math.pi * self.freq_hz
        for i in range(n_samples):
            t = t0_ms / 1000.0 + i / MIC_SAMPLE_RATE_HZ
            level = self.dc + self.amplitude * math.sin(w * t)
            out.append(int(round_half_away(clamp(level, 0, 1023))))
        return out


Waveform = Union[ConstantWave, SineWave]


@dataclass
class StimulusState:
    """Current physical stimulus per sensor. Defaults: zero / silence / NoEcho."""

    pot_angle_deg: float = 0.0
    temperature_c: float = 0.0
    waveform: Waveform = field(default_factory=ConstantWave)
    distance_cm: Optional[float] = NO_ECHO
    motion: bool = False
    illuminance_lux: float = 0.0

    def set_scalar(self, sensor: SensorKind, value: Optional[float]) -> None:
        """Apply a scenario/UI stimulus change given in physical units."""
        if sensor is SensorKind.POTENTIOMETER:
            self.pot_angle_deg = float(value)
        elif sensor is SensorKind.THERMOMETER:
            self.temperature_c = float(value)
        elif sensor is SensorKind.MICROPHONE:
            self.waveform = ConstantWave(float(value))
        elif sensor is SensorKind.DISTANCE:
            self.distance_cm = None if value is None else float(value)
        elif sensor is SensorKind.PIR:
            self.motion = bool(value)
        elif sensor is SensorKind.LIGHT:
            self.illuminance_lux = float(value)
        else:
            raise ValueError(f"unknown sensor {sensor!r}")

    def mic_window(self, now_ms: float, window_ms: float = MIC_WINDOW_MS) -> List[int]:
        """The AD window for the 50 ms ending at now_ms."""
        n = max(1, int(round(window_ms / 1000.0 * MIC_SAMPLE_RATE_HZ)))
        return self.waveform.window(now_ms - window_ms, n)

    def raw_reading(self, sensor: SensorKind, now_ms: float) -> Tuple[Optional[float], Optional[List[int]]]:
        """Read the sensor: (scalar raw value or None for NoEcho, mic window)."""
        if sensor is SensorKind.POTENTIOMETER:
            ad = round_half_away(clamp(self.pot_angle_deg, 0, 270) * 1023 / 270)
            return float(ad), None
        if sensor is SensorKind.THERMOMETER:
            return self.temperature_c, None
        if sensor is SensorKind.MICROPHONE:
            window = self.mic_window(now_ms)
            return window_amplitude(window), window
        if sensor is SensorKind.DISTANCE:
            return self.distance_cm, None
        if sensor is SensorKind.PIR:
            return 1.0 if self.motion else 0.0, None
        if sensor is SensorKind.LIGHT:
            return self.illuminance_lux, None
        raise ValueError(f"unknown sensor {sensor!r}")


def normalize_raw(sensor: SensorKind, raw: Optional[float]) -> int:
    """Normalize a scalar raw reading (mic: window amplitude) to 0..24."""
    if sensor is SensorKind.DISTANCE:
        return normalize_distance(raw)
    if sensor is SensorKind.MICROPHONE:
        # amplitude is already max-min; scale like the potentiometer
        return round_half_away(clamp(raw, 0, 1023) * 24 / 1023)
    if sensor is SensorKind.PIR:
        return normalize_pir(raw != 0)
    return NORMALIZERS[sensor](raw)


class SensorSampler:
    """Periodic sampler for whichever sensor is active.

    Owns the per-sensor due times; `sample_tick` returns a value only when the
    active sensor's period has elapsed.
    """

    def __init__(self, period_ms: Optional[dict] = None):
        self.period_ms = {k: DEFAULT_SAMPLING_PERIOD_MS for k in SensorKind}
        if period_ms:
            self.period_ms.update(period_ms)
        self._next_due = {k: 0.0 for k in SensorKind}

    def sample_tick(
        self, state: StimulusState, active: SensorKind, now_ms: float
    ) -> Optional[Tuple[NormalizedValue, RawSample]]:
        if now_ms < self._next_due[active]:
            return None
        self._next_due[active] = now_ms + self.period_ms[active]
        raw, _window = state.raw_reading(active, now_ms)
        value = normalize_raw(active, raw)
        sample = RawSample(active, -1.0 if raw is None else raw, now_ms)
        return NormalizedValue(value, active), sample
