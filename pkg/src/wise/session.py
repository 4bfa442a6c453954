"""Recording and playback of motion sessions.

A session file is line-oriented text: a `#WISE-SESSION v1` header,
`#key=value` metadata, then one CSV row per frame with a fixed column
order: timestamp, the five relative quaternions (B, LA, RA, LF, RF as
w,x,y,z at six decimals), the twelve joint angles (left side then right:
shoulder plane, elevation, rotation, elbow flexion, carrying, pronation,
at four decimals), and a singularity bitmask. Rows are flushed as written
so a file truncated by abrupt termination stays readable; a torn final
line is dropped with a warning on load.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, TextIO, Tuple

from .frames import SEGMENTS, SegmentId
from .jcs import ANGLE_CHANNELS, JointAngles
from .quat import UnitQuat
from .retarget import RetargetSet

SESSION_HEADER = "#WISE-SESSION v1"

# singularity bitmask assignment
FLAG_L_SHOULDER = 1
FLAG_R_SHOULDER = 2
FLAG_L_ELBOW = 4
FLAG_R_ELBOW = 8


class SessionError(ValueError):
    def __init__(self, code: str, detail: str = ""):
        self.code = code
        super().__init__(f"{code}" + (f": {detail}" if detail else ""))


def flags_from_angles(angles: JointAngles) -> int:
    flags = 0
    if angles.left.shoulder_singular:
        flags |= FLAG_L_SHOULDER
    if angles.right.shoulder_singular:
        flags |= FLAG_R_SHOULDER
    if angles.left.elbow_singular:
        flags |= FLAG_L_ELBOW
    if angles.right.elbow_singular:
        flags |= FLAG_R_ELBOW
    return flags


@dataclass(frozen=True)
class SessionRow:
    """One recorded frame: 33 numeric columns plus the singularity mask."""

    t_ms: int
    quats: Tuple[float, ...]    # 20 scalars, B..RF x (w,x,y,z)
    angles: Tuple[float, ...]   # 12 degrees, ANGLE_CHANNELS order
    flags: int = 0
    raw: Optional[str] = None   # original file text when loaded

    def angle(self, channel: str) -> float:
        return self.angles[ANGLE_CHANNELS.index(channel)]

    def quat(self, segment: SegmentId) -> UnitQuat:
        i = SEGMENTS.index(segment) * 4
        return UnitQuat(*self.quats[i:i + 4])

    def render(self) -> str:
        if self.raw is not None:
            return self.raw
        parts = [str(self.t_ms)]
        parts += [f"{v:.6f}" for v in self.quats]
        parts += [f"{v:.4f}" for v in self.angles]
        parts.append(str(self.flags))
        return ",".join(parts)


def row_from_pipeline(t_ms: int, rt: RetargetSet, angles: JointAngles) -> SessionRow:
    quats: List[float] = []
    for seg in SEGMENTS:
        quats.extend(rt.q_tilde[seg].as_tuple())
    values = tuple(angles.channel(ch) for ch in ANGLE_CHANNELS)
    return SessionRow(t_ms, tuple(quats), values, flags_from_angles(angles))


def parse_row(line: str) -> SessionRow:
    fields = line.split(",")
    if len(fields) != 34:
        raise SessionError("BAD_ROW", f"expected 34 columns, got {len(fields)}")
    t_ms = int(fields[0])
    quats = tuple(float(f) for f in fields[1:21])
    angles = tuple(float(f) for f in fields[21:33])
    return SessionRow(t_ms, quats, angles, int(fields[33]), raw=line)


class SessionWriter:
    """Incremental writer; every row is flushed so readers can tail safely."""

    def __init__(self, fp: TextIO, meta: Optional[Mapping[str, str]] = None):
        self.fp = fp
        self.rows_written = 0
        self._last_t: Optional[int] = None
        fp.write(SESSION_HEADER + "\n")
        for key, value in (meta or {}).items():
            fp.write(f"#{key}={value}\n")
        fp.flush()

    def write_row(self, row: SessionRow) -> None:
        if self._last_t is not None and row.t_ms <= self._last_t:
            raise SessionError("NON_MONOTONIC", f"{row.t_ms} after {self._last_t}")
        self.fp.write(row.render() + "\n")
        self.fp.flush()
        self._last_t = row.t_ms
        self.rows_written += 1


def record(fp: TextIO, rows: Iterable[SessionRow], meta: Optional[Mapping[str, str]] = None) -> int:
    """Write a whole session; returns the number of rows recorded."""
    writer = SessionWriter(fp, meta)
    for row in rows:
        writer.write_row(row)
    return writer.rows_written


@dataclass
class Session:
    meta: Dict[str, str] = field(default_factory=dict)
    rows: List[SessionRow] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def duration_ms(self) -> int:
        return self.rows[-1].t_ms if self.rows else 0

    def seek(self, to_ms: int) -> SessionRow:
        """Greatest row at or before ``to_ms`` (clamped to the session)."""
        if not self.rows:
            raise SessionError("NO_DATA", "empty session")
        times = [r.t_ms for r in self.rows]
        idx = bisect_right(times, to_ms) - 1
        return self.rows[max(idx, 0)]

    def channel_series(self, channel: str) -> List[float]:
        i = ANGLE_CHANNELS.index(channel)
        return [r.angles[i] for r in self.rows]


def load_session(fp: TextIO) -> Session:
    header = fp.readline().rstrip("\n")
    if header != SESSION_HEADER:
        raise SessionError("BAD_HEADER", f"got {header!r}")
    session = Session()
    content = fp.read()
    complete, _, tail = content.rpartition("\n")
    last_t: Optional[int] = None
    for line in (complete.split("\n") if complete else []):
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            session.meta[key] = value
            continue
        row = parse_row(line)
        if last_t is not None and row.t_ms <= last_t:
            raise SessionError("NON_MONOTONIC", f"row {row.t_ms} after {last_t}")
        session.rows.append(row)
        last_t = row.t_ms
    if tail:
        # writer emits row + newline in one call, so a missing newline
        # means the process died mid-row; keep it only if it still parses
        try:
            row = parse_row(tail)
            if last_t is None or row.t_ms > last_t:
                session.rows.append(row)
        except (SessionError, ValueError):
            session.warnings.append("dropped torn final line")
    return session


@dataclass
class PlaybackCursor:
    """Media-player position over a loaded session."""

    session: Session
    position_ms: float = 0.0
    state: str = "PAUSED"  # PLAYING or PAUSED
    rate: float = 1.0
    _next_idx: int = 0

    def play(self) -> None:
        self.state = "PLAYING"

    def pause(self) -> None:
        self.state = "PAUSED"

    def seek(self, to_ms: int) -> SessionRow:
        """Jump the cursor; playback resumes from the following row."""
        row = self.session.seek(to_ms)
        self.position_ms = float(min(max(to_ms, 0), self.session.duration_ms))
        times = [r.t_ms for r in self.session.rows]
        self._next_idx = bisect_right(times, self.position_ms)
        return row

    def step(self, wall_dt_ms: float) -> List[SessionRow]:
        """Advance by scaled wall time, returning every row passed."""
        if self.state != "PLAYING" or not self.session.rows:
            return []
        self.position_ms += self.rate * wall_dt_ms
        emitted: List[SessionRow] = []
        rows = self.session.rows
        while self._next_idx < len(rows) and rows[self._next_idx].t_ms <= self.position_ms:
            emitted.append(rows[self._next_idx])
            self._next_idx += 1
        if self.position_ms >= self.session.duration_ms:
            self.position_ms = float(self.session.duration_ms)
            self.state = "PAUSED"
        return emitted
