"""Byte sources, frame assembly, and the bounded hand-off queue.

Sources yield raw lines. File and device paths are read line by line;
``host:port`` opens a TCP client. A reader thread can pump any source into
a bounded queue that drops the oldest entry on overflow, so slow consumers
never stall a producer for more than one enqueue.

The assembler merges per-module frames into complete five-module sets: a
set is emitted when every module has reported within the freshness window,
using the newest frame per module and the newest timestamp overall.
"""

from __future__ import annotations

import socket
import threading
from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Union

from .frames import SEGMENTS, SegmentId, SensorFrameSet
from .wire import GameFrame, ParseError, WireFrame, parse_any

DEFAULT_WINDOW_MS = 100
QUEUE_CAPACITY = 1024


class IncompleteSetError(ValueError):
    """Raised when assembly finds stale or missing modules."""

    def __init__(self, stale: List[SegmentId]):
        self.stale = stale
        super().__init__("INCOMPLETE_SET " + ",".join(s.value for s in stale))


def assemble(latest: Dict[SegmentId, WireFrame], window_ms: int = DEFAULT_WINDOW_MS) -> SensorFrameSet:
    """Build a frame set from the newest frame per module.

    Modules missing entirely or older than ``window_ms`` relative to the
    newest frame are reported stale.
    """
    if not latest:
        raise IncompleteSetError(list(SEGMENTS))
    newest = max(f.t_ms for f in latest.values())
    stale = [s for s in SEGMENTS
             if s not in latest or newest - latest[s].t_ms > window_ms]
    if stale:
        raise IncompleteSetError(stale)
    return SensorFrameSet(
        newest,
        {s: latest[s].unit_quat() for s in SEGMENTS},
        {s: latest[s].calib() for s in SEGMENTS},
    )


class FrameAssembler:
    """Streaming assembler: push frames, get a set whenever all are fresh.

    Out-of-order arrivals within the window are tolerated; the newest
    timestamp per module wins. Each distinct assembled timestamp is
    emitted once.
    """

    def __init__(self, window_ms: int = DEFAULT_WINDOW_MS):
        self.window_ms = window_ms
        self.latest: Dict[SegmentId, WireFrame] = {}
        self._last_emitted_ms: Optional[int] = None

    def push(self, frame: WireFrame) -> Optional[SensorFrameSet]:
        held = self.latest.get(frame.module)
        if held is None or frame.t_ms >= held.t_ms:
            self.latest[frame.module] = frame
        try:
            fs = assemble(self.latest, self.window_ms)
        except IncompleteSetError:
            return None
        if fs.t_ms == self._last_emitted_ms:
            return None
        self._last_emitted_ms = fs.t_ms
        return fs


class DropOldestQueue:
    """Bounded thread-safe queue that discards the oldest item when full."""

    def __init__(self, capacity: int = QUEUE_CAPACITY):
        self._items: deque = deque()
        self.capacity = capacity
        self.dropped = 0
        self._lock = threading.Lock()
        self._ready = threading.Condition(self._lock)
        self._closed = False

    def put(self, item) -> None:
        with self._ready:
            if len(self._items) >= self.capacity:
                self._items.popleft()
                self.dropped += 1
            self._items.append(item)
            self._ready.notify()

    def close(self) -> None:
        with self._ready:
            self._closed = True
            self._ready.notify_all()

    def get(self, timeout: Optional[float] = None):
        """Next item, or None when the queue is closed and drained."""
        with self._ready:
            while not self._items:
                if self._closed:
                    return None
                if not self._ready.wait(timeout):
                    return None
            return self._items.popleft()

    def __iter__(self):
        while True:
            item = self.get()
            if item is None:
                return
            yield item


def open_source(spec: str) -> Iterator[bytes]:
    """Yield raw lines from a source spec: '-', a path, or host:port."""
    if spec == "-":
        import sys
        for line in sys.stdin.buffer:
            yield line
        return
    host, sep, port = spec.rpartition(":")
    if sep and port.isdigit() and "/" not in spec:
        with socket.create_connection((host, int(port))) as sock:
            buf = b""
            while True:
                chunk = sock.recv(4096)
                if not chunk:
                    break
                buf += chunk
                while b"\n" in buf:
                    line, buf = buf.split(b"\n", 1)
                    yield line + b"\n"
        return
    with open(spec, "rb") as fp:
        for line in fp:
            yield line


def iter_wire(lines: Iterable[bytes], on_error=None) -> Iterator[Union[WireFrame, GameFrame]]:
    """Parse a line stream, routing parse failures to ``on_error``."""
    for raw in lines:
        if not raw.strip():
            continue
        try:
            yield parse_any(raw)
        except ParseError as err:
            if on_error:
                on_error(err, raw)


def pump(lines: Iterable[bytes], queue: DropOldestQueue, on_error=None) -> threading.Thread:
    """Read a source on a dedicated thread into the bounded queue."""

    def run() -> None:
        try:
            for frame in iter_wire(lines, on_error):
                queue.put(frame)
        finally:
            queue.close()

    thread = threading.Thread(target=run, name="wise-source", daemon=True)
    thread.start()
    return thread


@dataclass
class StreamStats:
    parsed: int = 0
    errors: int = 0
