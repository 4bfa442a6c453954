"""Line protocol for sensor and force telemetry.

One ASCII frame per LF-terminated line:

    WISE1,<SEG>,<T>,<QW>,<QX>,<QY>,<QZ>,<G>,<A>,<M>[*<CRC8HEX>]

SEG is one of B, LA, RA, LF, RF; T is a decimal millisecond timestamp; the
four quaternion fields carry an optional sign, one integer digit, and
exactly six fraction digits; G, A, M are calibration levels 0..3. The
optional checksum is the CRC-32 (IEEE polynomial) of every character
before the '*', as eight uppercase hex digits.

Force devices reuse the magic with their own segment tags and payloads:

    WISE1,FK,<T>,<GRASP_N>,<ROT_DEG>      instrumented fork
    WISE1,KN,<T>,<GRASP_N>                instrumented knife
    WISE1,PD,<T>,<POKE_N>,<CUT_N>         pressure pad

Parsing is total: any input produces either a frame or a ParseError naming
the first offending field, never an unhandled exception.
"""

from __future__ import annotations

import math
import re
import zlib
from dataclasses import dataclass
from typing import Optional, Tuple, Union

from .frames import CalibStatus, SegmentId
from .quat import UnitQuat

MAGIC = "WISE1"
MAX_LINE_LEN = 1024
NORM_TOL = 1e-4  # allowed wire-quantization drift of the quaternion norm

BAD_MAGIC = "BAD_MAGIC"
BAD_SEGMENT = "BAD_SEGMENT"
BAD_NUMBER = "BAD_NUMBER"
BAD_CRC = "BAD_CRC"
NORM_OUT_OF_RANGE = "NORM_OUT_OF_RANGE"

_QUAT_RE = re.compile(r"^[+-]?\d\.\d{6}$")
_T_RE = re.compile(r"^\d{1,12}$")
_LEVEL_RE = re.compile(r"^[0-3]$")
_CRC_RE = re.compile(r"^[0-9A-F]{8}$")
_FORCE_RE = re.compile(r"^[+-]?\d{1,7}(\.\d{1,6})?$")

GAME_TAGS = ("FK", "KN", "PD")
_GAME_FIELDS = {"FK": 2, "KN": 1, "PD": 2}


class ParseError(ValueError):
    """Typed wire parse failure with the offending error code and field."""

    def __init__(self, code: str, field: str, detail: str = ""):
        self.code = code
        self.field = field
        super().__init__(f"{code} at {field}" + (f": {detail}" if detail else ""))


def crc32_hex(text: str) -> str:
    return f"{zlib.crc32(text.encode('ascii')):08X}"


@dataclass(frozen=True)
class WireFrame:
    """One parsed sensor line, carrying wire-exact quaternion values.

    The quaternion is kept exactly as transmitted (quantized to six
    decimals) so render/parse round-trips are bitwise stable; ingestion
    into a frame set renormalizes.
    """

    module: SegmentId
    t_ms: int
    q: Tuple[float, float, float, float]
    g: int
    a: int
    m: int
    crc_present: bool = False

    def unit_quat(self) -> UnitQuat:
        return UnitQuat(*self.q)

    def calib(self) -> CalibStatus:
        return CalibStatus(self.g, self.a, self.m)


@dataclass(frozen=True)
class GameFrame:
    """One parsed force-device line (fork, knife, or pressure pad)."""

    tag: str
    t_ms: int
    values: Tuple[float, ...]
    crc_present: bool = False

    @property
    def grasp_n(self) -> float:
        return self.values[0]

    @property
    def rotation_deg(self) -> float:
        return self.values[1]  # FK only


def render_frame(frame: WireFrame, with_crc: Optional[bool] = None) -> str:
    body = "{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{},{},{}".format(
        MAGIC, frame.module.value, frame.t_ms, *frame.q, frame.g, frame.a, frame.m)
    if frame.crc_present if with_crc is None else with_crc:
        return f"{body}*{crc32_hex(body)}"
    return body


def render_game_frame(frame: GameFrame, with_crc: Optional[bool] = None) -> str:
    vals = ",".join(f"{v:.3f}" for v in frame.values)
    body = f"{MAGIC},{frame.tag},{frame.t_ms},{vals}"
    if frame.crc_present if with_crc is None else with_crc:
        return f"{body}*{crc32_hex(body)}"
    return body


def _split_checksum(line: str) -> Tuple[str, bool]:
    """Strip and verify the optional CRC suffix; returns (body, had_crc)."""
    star = line.rfind("*")
    if star < 0:
        return line, False
    body, crc = line[:star], line[star + 1:]
    if not _CRC_RE.match(crc):
        raise ParseError(BAD_CRC, "crc", f"malformed checksum {crc!r}")
    try:
        actual = crc32_hex(body)
    except UnicodeEncodeError:
        raise ParseError(BAD_CRC, "crc", "non-ascii content under checksum")
    if actual != crc:
        raise ParseError(BAD_CRC, "crc", f"expected {actual}, got {crc}")
    return body, True


def _decode(data: Union[bytes, str]) -> str:
    if isinstance(data, bytes):
        line = data.decode("latin-1")
    else:
        line = data
    line = line.rstrip("\r\n")
    if len(line) > MAX_LINE_LEN:
        raise ParseError(BAD_MAGIC, "line", "line too long")
    return line


def parse_line(data: Union[bytes, str]) -> WireFrame:
    """Parse one sensor line; raises ParseError on the first bad field."""
    line = _decode(data)
    body, had_crc = _split_checksum(line)
    fields = body.split(",")
    if fields[0] != MAGIC:
        raise ParseError(BAD_MAGIC, "magic", f"got {fields[0]!r}")
    if len(fields) != 10:
        raise ParseError(BAD_NUMBER, "field_count", f"expected 10 fields, got {len(fields)}")
    try:
        module = SegmentId(fields[1])
    except ValueError:
        raise ParseError(BAD_SEGMENT, "module", f"got {fields[1]!r}")
    if not _T_RE.match(fields[2]):
        raise ParseError(BAD_NUMBER, "t_ms", f"got {fields[2]!r}")
    q = []
    for name, text in zip(("qw", "qx", "qy", "qz"), fields[3:7]):
        if not _QUAT_RE.match(text):
            raise ParseError(BAD_NUMBER, name, f"got {text!r}")
        q.append(float(text))
    levels = []
    for name, text in zip(("g", "a", "m"), fields[7:10]):
        if not _LEVEL_RE.match(text):
            raise ParseError(BAD_NUMBER, name, f"got {text!r}")
        levels.append(int(text))
    norm = math.sqrt(sum(c * c for c in q))
    if abs(norm - 1.0) > NORM_TOL:
        raise ParseError(NORM_OUT_OF_RANGE, "q", f"|q|={norm:.6f}")
    return WireFrame(module, int(fields[2]), tuple(q), *levels, crc_present=had_crc)


def parse_game_line(data: Union[bytes, str]) -> GameFrame:
    """Parse one force-device line (FK, KN, or PD tag)."""
    line = _decode(data)
    body, had_crc = _split_checksum(line)
    fields = body.split(",")
    if fields[0] != MAGIC:
        raise ParseError(BAD_MAGIC, "magic", f"got {fields[0]!r}")
    if len(fields) < 2 or fields[1] not in GAME_TAGS:
        raise ParseError(BAD_SEGMENT, "tag", f"got {fields[1] if len(fields) > 1 else ''!r}")
    tag = fields[1]
    expected = 3 + _GAME_FIELDS[tag]
    if len(fields) != expected:
        raise ParseError(BAD_NUMBER, "field_count",
                         f"{tag} expects {expected} fields, got {len(fields)}")
    if not _T_RE.match(fields[2]):
        raise ParseError(BAD_NUMBER, "t_ms", f"got {fields[2]!r}")
    values = []
    for i, text in enumerate(fields[3:]):
        if not _FORCE_RE.match(text):
            raise ParseError(BAD_NUMBER, f"value{i}", f"got {text!r}")
        values.append(float(text))
    return GameFrame(tag, int(fields[2]), tuple(values), crc_present=had_crc)


def parse_any(data: Union[bytes, str]) -> Union[WireFrame, GameFrame]:
    """Parse a line that may be either a sensor or a force-device frame."""
    line = _decode(data)
    head = line.split(",", 2)
    if len(head) > 1 and head[1] in GAME_TAGS:
        return parse_game_line(line)
    return parse_line(line)


def quantize_quat(q: UnitQuat) -> Tuple[float, float, float, float]:
    """Round quaternion components to the six decimals the wire carries."""
    return tuple(round(c, 6) for c in q.as_tuple())


def frame_for(module: SegmentId, t_ms: int, q: UnitQuat, calib: Optional[CalibStatus] = None) -> WireFrame:
    c = calib or CalibStatus(3, 3, 3)
    return WireFrame(module, t_ms, quantize_quat(q), c.gyro, c.accel, c.mag)
