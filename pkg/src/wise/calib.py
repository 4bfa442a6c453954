"""Calibration readiness tracking for the fifteen MARG sub-sensors.

Five modules each report gyroscope, accelerometer, and magnetometer levels
from 0 to 3. Levels merge monotonically (hardware occasionally reports
transient drops); readiness means all fifteen levels at 3. The suggested
next routine step follows the physical procedure order: keep the holder
still for the gyros, tilt it about each axis for the accelerometers, move
it randomly for the magnetometers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional

from .frames import CalibStatus, SEGMENTS, SegmentId, SensorFrameSet

NEXT_STEPS = ("HOLD_STILL", "TILT_45", "RANDOM_MOTION", "DONE")


def next_step(levels: Mapping[SegmentId, CalibStatus]) -> str:
    if any(levels[s].gyro < 3 for s in SEGMENTS):
        return "HOLD_STILL"
    if any(levels[s].accel < 3 for s in SEGMENTS):
        return "TILT_45"
    if any(levels[s].mag < 3 for s in SEGMENTS):
        return "RANDOM_MOTION"
    return "DONE"


@dataclass(frozen=True)
class CalibReport:
    """Immutable snapshot of the merged calibration state."""

    levels: Mapping[SegmentId, CalibStatus] = field(
        default_factory=lambda: {s: CalibStatus() for s in SEGMENTS}
    )

    @property
    def overall_ready(self) -> bool:
        return all(self.levels[s].complete for s in SEGMENTS)

    @property
    def next_step(self) -> str:
        return next_step(self.levels)

    def fill_fraction(self, segment: SegmentId, sensor: str) -> float:
        return getattr(self.levels[segment], sensor) / 3.0

    def update(self, frame: SensorFrameSet) -> "CalibReport":
        """Merge one frame's reported levels; levels never decrease."""
        merged: Dict[SegmentId, CalibStatus] = {}
        for seg in SEGMENTS:
            incoming = frame.calib.get(seg)
            merged[seg] = self.levels[seg].merged(incoming) if incoming else self.levels[seg]
        return CalibReport(merged)


class CalibMonitor:
    """Stream-driven readiness tracker.

    Elapsed time runs on the stream clock (frame timestamps): the first
    frame starts the clock and readiness freezes it. Live sources stamp
    frames from the wall clock, so the reading matches operator time.
    """

    def __init__(self) -> None:
        self.report = CalibReport()
        self._start_ms: Optional[int] = None
        self._last_ms: Optional[int] = None
        self._ready_ms: Optional[int] = None

    def update(self, frame: SensorFrameSet) -> CalibReport:
        if self._start_ms is None:
            self._start_ms = frame.t_ms
        self._last_ms = frame.t_ms
        self.report = self.report.update(frame)
        if self._ready_ms is None and self.report.overall_ready:
            self._ready_ms = frame.t_ms
        return self.report

    def reset(self) -> None:
        self.__init__()

    @property
    def ready(self) -> bool:
        return self._ready_ms is not None

    def elapsed_s(self) -> float:
        """Seconds from monitor start to first readiness, or running time."""
        if self._start_ms is None:
            return 0.0
        end = self._ready_ms if self._ready_ms is not None else self._last_ms
        return (end - self._start_ms) / 1000.0


def render_bars(report: CalibReport) -> str:
    """Text rendering of the per-sensor progress bars (3 cells per sensor)."""
    lines = []
    for seg in SEGMENTS:
        cells = []
        for sensor in ("gyro", "accel", "mag"):
            level = getattr(report.levels[seg], sensor)
            cells.append(f"{sensor[0]}[" + "#" * level + "." * (3 - level) + "]")
        lines.append(f"{seg.value:<2} " + " ".join(cells))
    lines.append(f"next: {report.next_step}  ready: {'yes' if report.overall_ready else 'no'}")
    return "\n".join(lines)
