import pytest

from dicetwin.link import (
    BadChecksum,
    BadLength,
    BadMagic,
    BadSensorId,
    BadValue,
    BadVersion,
    EncodeError,
    FRAME_LEN,
    Frame,
    FrameError,
    LinkConditions,
    LossyLink,
    decode,
    encode,
    encode_frame,
    is_stale,
    seq_is_newer,
)
from dicetwin.model import NormalizedValue, SensorKind


def nv(value, sensor=SensorKind.POTENTIOMETER):
    return NormalizedValue(value, sensor)


def test_encode_golden_frames():
    assert encode(nv(0), seq=0, raw_hint=0) == bytes.fromhex("4c01000000000000004d")
    assert encode(nv(24, SensorKind.PIR), seq=1, raw_hint=None) == bytes.fromhex("4c0101000418ffff0050")


def test_encode_decode_identity_over_all_values():
    for sensor in SensorKind:
        for value in range(25):
            frame = Frame(nv(value, sensor), seq=value * 7, raw_hint=value * 100, custom_mapping=value % 2 == 0)
            assert decode(encode_frame(frame)) == frame


def test_raw_hint_absent_round_trip():
    assert decode(encode(nv(5), 1, raw_hint=None)).raw_hint is None
    assert decode(encode(nv(5), 1, raw_hint=1234)).raw_hint == 1234


def test_custom_mapping_flag_round_trip():
    assert decode(encode(nv(5), 1, None, flags=1)).custom_mapping is True
    assert decode(encode(nv(5), 1, None, flags=0)).custom_mapping is False


def test_encode_rejects_out_of_range_fields():
    with pytest.raises(EncodeError):
        encode(nv(0), seq=-1)
    with pytest.raises(EncodeError):
        encode(nv(0), seq=65536)
    with pytest.raises(EncodeError):
        encode(nv(0), seq=0, raw_hint=65536)
    with pytest.raises(EncodeError):
        encode(nv(0), seq=0, flags=256)


def test_decode_rejects_each_malformation_distinctly():
    good = encode(nv(12, SensorKind.THERMOMETER), seq=42, raw_hint=2500)

    with pytest.raises(BadLength):
        decode(good[:9])
    with pytest.raises(BadLength):
        decode(good + b"\x00")

    bad = bytearray(good)
    bad[0] = 0x4D
    bad[9] = bad[9] ^ 0x4C ^ 0x4D  # keep the checksum valid
    with pytest.raises(BadMagic):
        decode(bytes(bad))

    bad = bytearray(good)
    bad[1] = 0x02
    bad[9] = bad[9] ^ 0x01 ^ 0x02
    with pytest.raises(BadVersion):
        decode(bytes(bad))

    bad = bytearray(good)
    bad[9] ^= 0xFF
    with pytest.raises(BadChecksum):
        decode(bytes(bad))

    bad = bytearray(good)
    bad[4] = 6
    bad[9] = bad[9] ^ good[4] ^ 6
    with pytest.raises(BadSensorId):
        decode(bytes(bad))

    bad = bytearray(good)
    bad[5] = 25
    bad[9] = bad[9] ^ good[5] ^ 25
    with pytest.raises(BadValue):
        decode(bytes(bad))


def test_every_single_bit_flip_is_rejected():
    good = encode(nv(7, SensorKind.LIGHT), seq=300, raw_hint=40000, flags=1)
    for byte_index in range(FRAME_LEN):
        for bit in range(8):
            corrupted = bytearray(good)
            corrupted[byte_index] ^= 1 << bit
            with pytest.raises(FrameError):
                decode(bytes(corrupted))


def test_link_conditions_validation():
    LinkConditions(0.5, 10.0, 2.0, 7)
    with pytest.raises(ValueError):
        LinkConditions(drop_probability=1.5)
    with pytest.raises(ValueError):
        LinkConditions(base_latency_ms=-1.0)
    with pytest.raises(ValueError):
        LinkConditions(jitter_ms=-0.1)
    with pytest.raises(ValueError):
        LinkConditions(seed=-1)


def test_link_replay_is_deterministic():
    a = LossyLink(LinkConditions(drop_probability=0.3, seed=99))
    b = LossyLink(LinkConditions(drop_probability=0.3, seed=99))
    pattern_a = [a.send(float(i)) for i in range(1000)]
    pattern_b = [b.send(float(i)) for i in range(1000)]
    assert pattern_a == pattern_b
    assert a.stats.sent == 1000
    assert a.stats.dropped == pattern_a.count(None)
    assert 200 < a.stats.dropped < 400  # roughly the asked-for 30%


def test_link_draws_are_consumed_even_at_zero_loss():
    # decision stream depends only on (seed, send count): switching conditions
    # mid-run must not shift later decisions
    a = LossyLink(LinkConditions(drop_probability=0.3, seed=5))
    reference = [a.send(0.0) is None for _ in range(200)]

    b = LossyLink(LinkConditions(drop_probability=0.0, seed=5))
    for _ in range(100):
        assert b.send(0.0) is not None
    b.set_conditions(LinkConditions(drop_probability=0.3, seed=5))
    tail = [b.send(0.0) is None for _ in range(100)]
    assert tail == reference[100:]


def test_latency_and_jitter_bounds():
    link = LossyLink(LinkConditions(base_latency_ms=30.0, jitter_ms=5.0, seed=3))
    for _ in range(500):
        delivery = link.send(1000.0)
        assert delivery is not None
        assert 1025.0 <= delivery <= 1035.0

    # jitter bigger than the base latency never yields time travel
    link = LossyLink(LinkConditions(base_latency_ms=1.0, jitter_ms=10.0, seed=3))
    deliveries = [link.send(1000.0) for _ in range(500)]
    assert all(d >= 1000.0 for d in deliveries)
    assert any(d == 1000.0 for d in deliveries)  # the clamp engages


def test_stale_boundary_is_exclusive():
    assert not is_stale(last_rx_ms=0.0, now_ms=1000.0)
    assert is_stale(last_rx_ms=0.0, now_ms=1000.001)
    assert not is_stale(last_rx_ms=500.0, now_ms=1400.0, timeout_ms=1000.0)


def test_seq_is_newer_wraparound():
    assert seq_is_newer(0, None)
    assert seq_is_newer(1, 0)
    assert not seq_is_newer(0, 1)
    assert not seq_is_newer(5, 5)
    assert seq_is_newer(0, 65535)  # wrap
    assert not seq_is_newer(65535, 0)
    assert seq_is_newer(32767, 0)  # just inside the half-window
    assert not seq_is_newer(32768, 0)  # exactly half the space away
