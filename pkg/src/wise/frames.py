"""Shared sensor-frame types: segments, calibration levels, frame sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Mapping

from .quat import DomainError, UnitQuat


class SegmentId(str, Enum):
    """The five instrumented body segments, in canonical column order."""

    B = "B"    # back
    LA = "LA"  # left upper arm
    RA = "RA"  # right upper arm
    LF = "LF"  # left forearm
    RF = "RF"  # right forearm


SEGMENTS = (SegmentId.B, SegmentId.LA, SegmentId.RA, SegmentId.LF, SegmentId.RF)


@dataclass(frozen=True, slots=True)
class CalibStatus:
    """Per-module calibration levels, 0 (uninitialized) to 3 (fully calibrated)."""

    gyro: int = 0
    accel: int = 0
    mag: int = 0

    def __post_init__(self) -> None:
        for name in ("gyro", "accel", "mag"):
            level = getattr(self, name)
            if not isinstance(level, int) or not 0 <= level <= 3:
                raise DomainError(f"{name} calibration level must be an int in 0..3, got {level!r}")

    def merged(self, other: "CalibStatus") -> "CalibStatus":
        """Monotone merge: transient drops reported by hardware are ignored."""
        return CalibStatus(
            max(self.gyro, other.gyro),
            max(self.accel, other.accel),
            max(self.mag, other.mag),
        )

    @property
    def complete(self) -> bool:
        return self.gyro == 3 and self.accel == 3 and self.mag == 3


CALIB_DONE = CalibStatus(3, 3, 3)


@dataclass(frozen=True)
class SensorFrameSet:
    """One time-stamped snapshot of all five world-frame orientations."""

    t_ms: int
    quats: Mapping[SegmentId, UnitQuat]
    calib: Mapping[SegmentId, CalibStatus] = field(default_factory=dict)

    def __post_init__(self) -> None:
        missing = [s.value for s in SEGMENTS if s not in self.quats]
        if missing:
            raise DomainError(f"frame set missing segments: {missing}")
        if not self.calib:
            object.__setattr__(self, "calib", {s: CALIB_DONE for s in SEGMENTS})

    def q(self, segment: SegmentId) -> UnitQuat:
        return self.quats[segment]

    def with_quats(self, quats: Dict[SegmentId, UnitQuat]) -> "SensorFrameSet":
        return SensorFrameSet(self.t_ms, quats, self.calib)
