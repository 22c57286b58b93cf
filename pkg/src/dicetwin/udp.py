"""Optional UDP carriage of wire frames between two serve processes.

With --udp-tx the sensor cube's frames leave the process as real datagrams
instead of riding the in-process link; with --udp-rx received datagrams feed
the actuator cube. Loss and latency simulation stay with the in-process link;
UDP delivers whatever the OS delivers.
"""

from __future__ import annotations

import logging
import socket
import threading
from typing import Callable, Tuple

from .link import FRAME_LEN

log = logging.getLogger(__name__)


def parse_endpoint(text: str) -> Tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise ValueError(f"expected HOST:PORT, got {text!r}")
    return (host or "127.0.0.1", int(port))


class UdpFrameSender:
    """frame_tap callable that forwards every encoded frame to one endpoint."""

    def __init__(self, host: str, port: int):
        self._addr = (host, port)
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)

    def __call__(self, frame_bytes: bytes) -> None:
        try:
            self._sock.sendto(frame_bytes, self._addr)
        except OSError as exc:
            log.warning("udp send failed: %s", exc)

    def close(self) -> None:
        self._sock.close()


class UdpFrameReceiver:
    """Background listener handing each well-sized datagram to a callback."""

    def __init__(self, port: int, on_frame: Callable[[bytes], None], host: str = "127.0.0.1"):
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self._sock.bind((host, port))
        self._sock.settimeout(0.25)
        self._on_frame = on_frame
        self._stop = threading.Event()
        self._thread = threading.Thread(target=self._run, name="dicetwin-udp-rx", daemon=True)

    def start(self) -> None:
        self._thread.start()

    def _run(self) -> None:
        while not self._stop.is_set():
            try:
                data, _addr = self._sock.recvfrom(64)
            except socket.timeout:
                continue
            except OSError:
                return
            if len(data) == FRAME_LEN:
                self._on_frame(data)

    def close(self) -> None:
        self._stop.set()
        self._thread.join(timeout=1.0)
        self._sock.close()
