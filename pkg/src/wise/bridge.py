"""UI bridge: newline-delimited event/command protocol over a local socket.

Server-to-client messages are `EVT <topic> <payload-CSV>` with topics
CALIB, MOUNT, POSE, ANGLES, PLAYBACK, and GAME. Client-to-server control
messages are `CMD <verb> <args>`; the first client to send a command
becomes the single control client, later claimants are refused with an
`ERR` line. New clients receive the last event per topic as a snapshot.

Payloads:

    CALIB     t_ms,<g,a,m per B,LA,RA,LF,RF>,<ready 0|1>,<next_step>
    MOUNT     t_ms,<l_ie>,<l_carry>,<l_cue>,<r_ie>,<r_carry>,<r_cue>
    POSE      t_ms,<PATIENT|INSTRUCTOR>,<20 left-handed quat scalars>
    ANGLES    t_ms,<12 angles>,<flags>
    PLAYBACK  position_ms,duration_ms,<PLAYING|PAUSED>,rate
    GAME      t_ms,<fork|grasp>,<level>,<phase>,<completions>,<score>[,<events;..>]

Browsers cannot open raw TCP sockets, so the listener speaks WebSocket as
well: a connection whose first bytes form an HTTP GET is upgraded and then
carries exactly the same newline-delimited text inside text frames.
"""

from __future__ import annotations

import asyncio
import base64
import hashlib
import struct
from typing import Dict, Iterable, List, Optional

from .frames import SEGMENTS
from .jcs import ANGLE_CHANNELS, JointAngles
from .mounting import MountState
from .calib import CalibReport
from .retarget import RetargetSet
from .session import flags_from_angles

TOPICS = ("CALIB", "MOUNT", "POSE", "ANGLES", "PLAYBACK", "GAME")
CMD_VERBS = ("PLAY", "PAUSE", "SEEK", "VIEW", "SELECT_EXERCISE",
             "CAPTURE_KEYPOINT", "SET_INTERVAL", "SAVE_EXERCISE")

_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"


# -- payload builders --------------------------------------------------------


def calib_payload(t_ms: int, report: CalibReport) -> str:
    levels: List[str] = []
    for seg in SEGMENTS:
        st = report.levels[seg]
        levels += [str(st.gyro), str(st.accel), str(st.mag)]
    ready = "1" if report.overall_ready else "0"
    return f"{t_ms}," + ",".join(levels) + f",{ready},{report.next_step}"


def mount_payload(state: MountState) -> str:
    parts = [str(state.t_ms)]
    for side in (state.left, state.right):
        parts += [f"{side.ie_rotation:.4f}", f"{side.carrying:.4f}", side.cue]
    return ",".join(parts)


def pose_payload(t_ms: int, rt: RetargetSet, role: str = "PATIENT") -> str:
    scalars: List[str] = []
    quats = rt.q_acute if rt.q_acute else rt.q_tilde
    for seg in SEGMENTS:
        scalars += [f"{c:.6f}" for c in quats[seg].as_tuple()]
    return f"{t_ms},{role}," + ",".join(scalars)


def angles_payload(t_ms: int, angles: JointAngles) -> str:
    values = [f"{angles.channel(ch):.4f}" for ch in ANGLE_CHANNELS]
    return f"{t_ms}," + ",".join(values) + f",{flags_from_angles(angles)}"


def playback_payload(position_ms: float, duration_ms: int, state: str, rate: float) -> str:
    return f"{position_ms:.0f},{duration_ms},{state},{rate:g}"


def game_payload(t_ms: int, game: str, level: int, phase: str,
                 completions: int, score: int, events: Iterable[str] = ()) -> str:
    base = f"{t_ms},{game},{level},{phase},{completions},{score}"
    ev = ";".join(events)
    return f"{base},{ev}" if ev else base


# -- WebSocket minimal framing ----------------------------------------------


def ws_accept_key(client_key: str) -> str:
    digest = hashlib.sha1((client_key + _WS_GUID).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


def ws_encode_text(payload: str) -> bytes:
    data = payload.encode("utf-8")
    n = len(data)
    if n < 126:
        header = struct.pack("!BB", 0x81, n)
    elif n < 1 << 16:
        header = struct.pack("!BBH", 0x81, 126, n)
    else:
        header = struct.pack("!BBQ", 0x81, 127, n)
    return header + data


async def ws_read_message(reader: asyncio.StreamReader) -> Optional[bytes]:
    """One complete message payload, or None on close/EOF. Pings are not
    answered here; the caller owns the writer."""
    data = b""
    while True:
        head = await reader.readexactly(2)
        fin = head[0] & 0x80
        opcode = head[0] & 0x0F
        masked = head[1] & 0x80
        length = head[1] & 0x7F
        if length == 126:
            length = struct.unpack("!H", await reader.readexactly(2))[0]
        elif length == 127:
            length = struct.unpack("!Q", await reader.readexactly(8))[0]
        mask = await reader.readexactly(4) if masked else b""
        payload = await reader.readexactly(length) if length else b""
        if mask:
            payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
        if opcode == 0x8:
            return None
        if opcode in (0x9, 0xA):  # ping/pong: ignore payload
            continue
        data += payload
        if fin:
            return data


class _Client:
    def __init__(self, writer: asyncio.StreamWriter, websocket: bool):
        self.writer = writer
        self.websocket = websocket

    def send_line(self, line: str) -> None:
        if self.writer.is_closing():
            return
        if self.websocket:
            self.writer.write(ws_encode_text(line + "\n"))
        else:
            self.writer.write((line + "\n").encode("utf-8"))


class BridgeServer:
    """Event broadcaster plus single-control command dispatch.

    ``command_handler(verb, args) -> Optional[str]`` is called for every
    command from the control client; a returned string is sent back as an
    error line, None acknowledges.
    """

    def __init__(self, host: str, port: int, command_handler=None):
        self.host = host
        self.port = port
        self.command_handler = command_handler
        self.clients: List[_Client] = []
        self.last_event: Dict[str, str] = {}
        self._control: Optional[_Client] = None
        self._server: Optional[asyncio.AbstractServer] = None

    async def start(self) -> None:
        self._server = await asyncio.start_server(self._on_connect, self.host, self.port)

    @property
    def bound_port(self) -> int:
        return self._server.sockets[0].getsockname()[1]

    async def close(self) -> None:
        if self._server:
            self._server.close()
            await self._server.wait_closed()
        for client in self.clients:
            client.writer.close()

    def publish(self, topic: str, payload: str) -> None:
        if topic not in TOPICS:
            raise ValueError(f"unknown topic {topic!r}")
        line = f"EVT {topic} {payload}"
        self.last_event[topic] = line
        for client in list(self.clients):
            client.send_line(line)

    async def _on_connect(self, reader: asyncio.StreamReader,
                          writer: asyncio.StreamWriter) -> None:
        # Protocol sniff: WebSocket clients send their GET immediately;
        # plain line clients may connect silently just to listen, so give
        # up on the sniff quickly and treat them as line clients.
        first = b""
        try:
            first = await asyncio.wait_for(reader.readexactly(4), timeout=0.25)
        except asyncio.TimeoutError:
            pass
        except asyncio.IncompleteReadError as err:
            first = err.partial
        except ConnectionError:
            writer.close()
            return
        websocket = first == b"GET "
        if websocket:
            ok = await self._ws_handshake(first, reader, writer)
            if not ok:
                writer.close()
                return
        client = _Client(writer, websocket)
        self.clients.append(client)
        for line in self.last_event.values():
            client.send_line(line)
        try:
            await self._client_loop(client, reader, first if not websocket else b"")
        except (ConnectionError, asyncio.IncompleteReadError):
            pass
        finally:
            if client in self.clients:
                self.clients.remove(client)
            if self._control is client:
                self._control = None
            writer.close()

    async def _ws_handshake(self, first: bytes, reader: asyncio.StreamReader,
                            writer: asyncio.StreamWriter) -> bool:
        request = first + await reader.readuntil(b"\r\n\r\n")
        key = None
        for line in request.decode("latin-1").split("\r\n"):
            name, _, value = line.partition(":")
            if name.strip().lower() == "sec-websocket-key":
                key = value.strip()
        if not key:
            writer.write(b"HTTP/1.1 400 Bad Request\r\n\r\n")
            await writer.drain()
            return False
        writer.write(
            b"HTTP/1.1 101 Switching Protocols\r\n"
            b"Upgrade: websocket\r\nConnection: Upgrade\r\n"
            b"Sec-WebSocket-Accept: " + ws_accept_key(key).encode("ascii") + b"\r\n\r\n")
        await writer.drain()
        return True

    async def _client_loop(self, client: _Client, reader: asyncio.StreamReader,
                           carry: bytes) -> None:
        buf = carry
        while True:
            if client.websocket:
                message = await ws_read_message(reader)
                if message is None:
                    return
                buf += message
            else:
                chunk = await reader.read(4096)
                if not chunk:
                    return
                buf += chunk
            while b"\n" in buf:
                raw, buf = buf.split(b"\n", 1)
                line = raw.decode("utf-8", "replace").strip()
                if line:
                    self._handle_command(client, line)

    def _handle_command(self, client: _Client, line: str) -> None:
        parts = line.split(" ", 2)
        if parts[0] != "CMD" or len(parts) < 2:
            client.send_line("ERR PROTOCOL expected CMD <verb> [args]")
            return
        verb = parts[1]
        args = parts[2] if len(parts) > 2 else ""
        if verb not in CMD_VERBS:
            client.send_line(f"ERR PROTOCOL unknown verb {verb}")
            return
        if self._control is None:
            self._control = client
        elif self._control is not client:
            client.send_line("ERR CONTROL another client holds control")
            return
        error = self.command_handler(verb, args) if self.command_handler else None
        if error:
            client.send_line(f"ERR {error}")
        else:
            client.send_line(f"OK {verb}")
