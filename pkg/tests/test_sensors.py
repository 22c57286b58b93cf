import math

import pytest

from dicetwin.model import NormalizedValue, SensorKind
from dicetwin.sensors import (
    MIC_SAMPLE_RATE_HZ,
    MIC_WINDOW_MS,
    ConstantWave,
    EmptyWindow,
    SensorSampler,
    SineWave,
    StimulusState,
    normalize_distance,
    normalize_light,
    normalize_microphone,
    normalize_pir,
    normalize_potentiometer,
    normalize_raw,
    normalize_thermometer,
    window_amplitude,
)


def test_potentiometer_table():
    cases = [(0, 0), (21, 0), (22, 1), (512, 12), (939, 22), (1023, 24), (-5, 0), (2000, 24)]
    for raw, expected in cases:
        assert normalize_potentiometer(raw) == expected, raw


def test_thermometer_table():
    cases = [(0.0, 0), (1.05, 1), (25.0, 12), (50.0, 24), (-3.0, 0), (60.0, 24)]
    for t, expected in cases:
        assert normalize_thermometer(t) == expected, t


def test_microphone_window_amplitude_and_table():
    assert window_amplitude([512] * 10) == 0
    assert window_amplitude([200, 800]) == 600
    assert normalize_microphone([512] * 400) == 0
    assert normalize_microphone([200, 800]) == 14  # amp 600
    assert normalize_microphone([0, 1023]) == 24
    with pytest.raises(EmptyWindow):
        normalize_microphone([])


def test_microphone_ignores_dc_offset():
    # same swing at different dc levels gives the same value
    for dc in (300, 400, 500):
        window = [dc - 150, dc + 150]
        assert normalize_microphone(window) == normalize_microphone([150, 450])


def test_distance_table():
    cases = [
        (None, 0),  # no echo
        (0.0, 0),
        (0.49, 0),
        (0.5, 1),  # cutoff is exclusive; at the cutoff the clamp to 1 cm applies
        (1.0, 1),
        (36.0, 12),
        (37.0, 13),
        (72.0, 24),
        (100.0, 24),
    ]
    for d, expected in cases:
        assert normalize_distance(d) == expected, d


def test_pir_table():
    assert normalize_pir(0) == 0
    assert normalize_pir(False) == 0
    assert normalize_pir(1) == 24
    assert normalize_pir(True) == 24


def test_light_table():
    cases = [(0, 0), (1, 0), (256, 2), (16384, 12), (65535, 24), (70000, 24)]
    for lux, expected in cases:
        assert normalize_light(lux) == expected, lux


def test_light_uses_square_root_compression():
    # quartering the lux halves the normalized value (up to rounding)
    assert normalize_light(65536 / 4) == 12
    assert normalize_light(65536 / 16) == 6


def test_constant_wave_window():
    assert ConstantWave(512.0).window(0.0, 4) == [512, 512, 512, 512]
    assert ConstantWave(2000.0).window(0.0, 1) == [1023]  # AD clamp


def test_sine_wave_window_spans_expected_amplitude():
    n = int(MIC_WINDOW_MS / 1000.0 * MIC_SAMPLE_RATE_HZ)
    assert n == 400
    # 100 Hz at 8 kHz: sample 20 sits exactly on the positive peak
    window = SineWave(freq_hz=100.0, amplitude=300.0, dc=500.0).window(0.0, n)
    assert max(window) == 800
    assert min(window) == 200
    assert normalize_microphone(window) == 14


def test_sine_wave_clamps_to_ad_range():
    window = SineWave(freq_hz=100.0, amplitude=900.0, dc=512.0).window(0.0, 400)
    assert max(window) == 1023
    assert min(window) == 0


def test_stimulus_defaults_are_quiet():
    state = StimulusState()
    for sensor in SensorKind:
        raw, _window = state.raw_reading(sensor, now_ms=50.0)
        assert normalize_raw(sensor, raw) == 0, sensor


def test_stimulus_set_scalar_reaches_each_sensor():
    state = StimulusState()
    state.set_scalar(SensorKind.POTENTIOMETER, 135.0)
    raw, _ = state.raw_reading(SensorKind.POTENTIOMETER, 0.0)
    assert raw == 512.0  # 135/270 of the dial
    assert normalize_raw(SensorKind.POTENTIOMETER, raw) == 12

    state.set_scalar(SensorKind.THERMOMETER, 50.0)
    assert state.raw_reading(SensorKind.THERMOMETER, 0.0)[0] == 50.0

    state.set_scalar(SensorKind.MICROPHONE, 700.0)  # constant level, no swing
    raw, window = state.raw_reading(SensorKind.MICROPHONE, 50.0)
    assert raw == 0.0
    assert len(window) == 400

    state.set_scalar(SensorKind.DISTANCE, 36.0)
    assert normalize_raw(SensorKind.DISTANCE, state.raw_reading(SensorKind.DISTANCE, 0.0)[0]) == 12
    state.set_scalar(SensorKind.DISTANCE, None)
    assert state.raw_reading(SensorKind.DISTANCE, 0.0)[0] is None
    assert normalize_raw(SensorKind.DISTANCE, None) == 0

    state.set_scalar(SensorKind.PIR, 1)
    assert normalize_raw(SensorKind.PIR, state.raw_reading(SensorKind.PIR, 0.0)[0]) == 24

    state.set_scalar(SensorKind.LIGHT, 16384.0)
    assert normalize_raw(SensorKind.LIGHT, state.raw_reading(SensorKind.LIGHT, 0.0)[0]) == 12


def test_sampler_honors_period():
    sampler = SensorSampler()
    state = StimulusState()
    state.set_scalar(SensorKind.THERMOMETER, 25.0)
    first = sampler.sample_tick(state, SensorKind.THERMOMETER, 0.0)
    assert first is not None
    nv, raw = first
    assert nv == NormalizedValue(12, SensorKind.THERMOMETER)
    assert raw.value == 25.0
    assert sampler.sample_tick(state, SensorKind.THERMOMETER, 25.0) is None
    assert sampler.sample_tick(state, SensorKind.THERMOMETER, 50.0) is not None


def test_sampler_tracks_periods_per_sensor():
    sampler = SensorSampler({SensorKind.LIGHT: 100.0})
    state = StimulusState()
    assert sampler.sample_tick(state, SensorKind.LIGHT, 0.0) is not None
    assert sampler.sample_tick(state, SensorKind.LIGHT, 50.0) is None
    assert sampler.sample_tick(state, SensorKind.LIGHT, 100.0) is not None
    # an untouched sensor is due immediately
    assert sampler.sample_tick(state, SensorKind.PIR, 100.0) is not None


def test_monotonic_normalizations_over_integer_domains():
    prev = 0
    for x in range(0, 1024):
        v = normalize_potentiometer(x)
        assert 0 <= v <= 24 and v >= prev
        prev = v
    assert v == 24

    prev = 0
    for lux in range(0, 65536):
        v = normalize_light(lux)
        assert 0 <= v <= 24 and v >= prev
        prev = v
    assert v == 24

    prev = 0
    for tenth in range(0, 501):
        v = normalize_thermometer(tenth / 10.0)
        assert 0 <= v <= 24 and v >= prev
        prev = v
    assert v == 24

    prev = 0
    for cm in range(1, 73):
        v = normalize_distance(float(cm))
        assert 1 <= v <= 24 and v >= prev
        prev = v
    assert v == 24
