"""Wire frame format and the simulated lossy datagram link between the cubes.

A frame is exactly 10 bytes:

    offset  field      size  notes
    0       magic      1     0x4C
    1       version    1     0x01
    2       seq        2     unsigned, little-endian, wraps mod 65536
    4       sensor_id  1     0..5
    5       value      1     0..24
    6       raw_hint   2     unsigned LE debug echo of the raw reading;
                             0xFFFF means absent
    8       flags      1     bit0 = custom mapping active, rest reserved 0
    9       checksum   1     XOR of bytes 0..8

The link drops, delays and jitters deliveries from a seeded PRNG, so a run is
fully reproducible from (seed, send sequence).
"""

from __future__ import annotations

import random
import struct
from dataclasses import dataclass
from typing import Optional

from .model import DiceError, NormalizedValue, SensorKind

FRAME_LEN = 10
MAGIC = 0x4C
VERSION = 0x01
RAW_HINT_ABSENT = 0xFFFF
FLAG_CUSTOM_MAPPING = 0x01

#: No frame for this long and the actuator falls back to its neutral output.
STALE_TIMEOUT_MS = 1000.0


class FrameError(DiceError):
    pass


class EncodeError(FrameError):
    pass


class BadLength(FrameError):
    pass


class BadMagic(FrameError):
    pass


class BadVersion(FrameError):
    pass


class BadChecksum(FrameError):
    pass


class BadSensorId(FrameError):
    pass


class BadValue(FrameError):
    pass


@dataclass(frozen=True)
class Frame:
    value: NormalizedValue
    seq: int
    raw_hint: Optional[int] = None  # None = absent on the wire (0xFFFF)
    custom_mapping: bool = False


def _xor(data: bytes) -> int:
    c = 0
    for b in data:
        c ^= b
    return c


def encode(
    v: NormalizedValue,
    seq: int,
    raw_hint: Optional[int] = None,
    flags: int = 0,
) -> bytes:
    """Encode one frame; raises EncodeError on out-of-range fields."""
    if not 0 <= seq <= 0xFFFF:
        raise EncodeError(f"seq out of range: {seq}")
    if not 0 <= v.value <= 24:
        raise EncodeError(f"value out of range: {v.value}")
    hint = RAW_HINT_ABSENT if raw_hint is None else raw_hint
    if not 0 <= hint <= 0xFFFF:
        raise EncodeError(f"raw_hint out of range: {raw_hint}")
    if not 0 <= flags <= 0xFF:
        raise EncodeError(f"flags out of range: {flags}")
    body = struct.pack(
        "<BBHBBHB", MAGIC, VERSION, seq, v.sensor.wire_id, v.value, hint, flags
    )
    return body + bytes([_xor(body)])


def encode_frame(f: Frame) -> bytes:
    flags = FLAG_CUSTOM_MAPPING if f.custom_mapping else 0
    return encode(f.value, f.seq, f.raw_hint, flags)


def decode(data: bytes) -> Frame:
    """Decode and validate 10 bytes; each malformation raises its own error."""
    if len(data) != FRAME_LEN:
        raise BadLength(f"frame must be {FRAME_LEN} bytes, got {len(data)}")
    magic, version, seq, sensor_id, value, hint, flags = struct.unpack("<BBHBBHB", data[:9])
    if magic != MAGIC:
        raise BadMagic(f"bad magic 0x{magic:02X}")
    if version != VERSION:
        raise BadVersion(f"unsupported version {version}")
    if _xor(data[:9]) != data[9]:
        raise BadChecksum(f"checksum mismatch: computed 0x{_xor(data[:9]):02X}, frame has 0x{data[9]:02X}")
    if sensor_id > 5:
        raise BadSensorId(f"sensor id {sensor_id} out of range")
    if value > 24:
        raise BadValue(f"value {value} out of range")
    return Frame(
        NormalizedValue(value, SensorKind.from_wire_id(sensor_id)),
        seq,
        None if hint == RAW_HINT_ABSENT else hint,
        bool(flags & FLAG_CUSTOM_MAPPING),
    )


@dataclass(frozen=True)
class LinkConditions:
    drop_probability: float = 0.0
    base_latency_ms: float = 0.0
    jitter_ms: float = 0.0  # uniform +/- around base latency
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.drop_probability <= 1.0:
            raise ValueError(f"drop_probability must be in [0,1]: {self.drop_probability}")
        if self.base_latency_ms < 0 or self.jitter_ms < 0:
            raise ValueError("latency and jitter must be non-negative")
        if not 0 <= self.seed <= 2**64 - 1:
            raise ValueError("seed must fit in 64 bits")


@dataclass
class LinkStats:
    sent: int = 0
    delivered: int = 0
    dropped: int = 0


class LossyLink:
    """Seeded drop/latency decisions; one PRNG stream per link instance.

    Both the drop and the jitter draws happen on every send, so the decision
    sequence depends only on (seed, number of sends), not on the current
    conditions. Conditions may be swapped mid-run without losing determinism.
    """

    def __init__(self, conditions: LinkConditions):
        self.conditions = conditions
        self._rng = random.Random(conditions.seed)
        self.stats = LinkStats()

    def set_conditions(self, conditions: LinkConditions, reseed: bool = False) -> None:
        self.conditions = conditions
        if reseed:
            self._rng = random.Random(conditions.seed)

    def send(self, now_ms: float) -> Optional[float]:
        """Decide one send: None if dropped, else the delivery time in ms."""
        c = self.conditions
        drop_draw = self._rng.random()
        jitter_draw = self._rng.random()
        self.stats.sent += 1
        if drop_draw < c.drop_probability:
            self.stats.dropped += 1
            return None
        delay = c.base_latency_ms + (2.0 * jitter_draw - 1.0) * c.jitter_ms
        if delay < 0.0:
            delay = 0.0
        return now_ms + delay

    def mark_delivered(self) -> None:
        self.stats.delivered += 1


def link_send(frame_bytes: bytes, link: LossyLink, now_ms: float) -> Optional[float]:
    """Schedule one frame on the link; None means it was dropped."""
    return link.send(now_ms)


def is_stale(last_rx_ms: float, now_ms: float, timeout_ms: float = STALE_TIMEOUT_MS) -> bool:
    """True once the gap since the last received frame exceeds the timeout."""
    return now_ms - last_rx_ms > timeout_ms


def seq_is_newer(seq: int, last_seen: Optional[int]) -> bool:
    """Wraparound-aware: newer iff ahead of last_seen within a 32768 half-window."""
    if last_seen is None:
        return True
    diff = (seq - last_seen) & 0xFFFF
    return 0 < diff < 0x8000
