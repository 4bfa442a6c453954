"""Exercise authoring and adherence scoring.

An exercise is an ordered list of captured keypoint poses (the five
relative segment quaternions) with a time interval between consecutive
keypoints. Playback interpolates each segment's quaternion spherically
inside every interval, so keypoint poses are hit exactly at interval
boundaries and the motion between them runs at constant angular velocity.

Scoring segments a recorded angle channel into repetitions by hysteresis:
a repetition opens when the channel rises above a fraction of the target
and closes when it falls back below; the per-repetition peaks are reported
as mean and sample standard deviation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Dict, List, Mapping, Optional, Sequence, TextIO, Tuple

from .frames import SEGMENTS, SegmentId
from .quat import DomainError, UnitQuat, slerp
from .retarget import RetargetSet

EXERCISE_HEADER = "#WISE-EXERCISE v1"
DEFAULT_INTERVAL_S = 2.0
DEFAULT_TICK_HZ = 50.0
DEFAULT_OPEN_FRACTION = 0.2  # hysteresis threshold as a fraction of target


@dataclass(frozen=True)
class Exercise:
    """Named keypoint sequence; ``intervals_s[i]`` separates keypoint i and i+1."""

    name: str = "exercise"
    keypoints: Tuple[Mapping[SegmentId, UnitQuat], ...] = ()
    intervals_s: Tuple[float, ...] = ()
    tick_rate_hz: float = DEFAULT_TICK_HZ

    def __post_init__(self) -> None:
        if self.keypoints and len(self.intervals_s) != len(self.keypoints) - 1:
            raise DomainError("need exactly one interval between consecutive keypoints")
        if any(iv <= 0 for iv in self.intervals_s):
            raise DomainError("intervals must be positive")

    @property
    def duration_s(self) -> float:
        return sum(self.intervals_s)

    def playable(self) -> bool:
        return len(self.keypoints) >= 2


def add_keypoint(ex: Exercise, pose: RetargetSet) -> Exercise:
    """Append a captured pose; a default editable interval precedes it."""
    kp = {seg: pose.q_tilde[seg] for seg in SEGMENTS}
    intervals = ex.intervals_s + ((DEFAULT_INTERVAL_S,) if ex.keypoints else ())
    return replace(ex, keypoints=ex.keypoints + (kp,), intervals_s=intervals)


def undo_keypoint(ex: Exercise) -> Exercise:
    if not ex.keypoints:
        return ex
    return replace(ex, keypoints=ex.keypoints[:-1],
                   intervals_s=ex.intervals_s[:-1] if ex.intervals_s else ())


def set_interval(ex: Exercise, index: int, seconds: float) -> Exercise:
    if seconds <= 0:
        raise DomainError("interval must be positive")
    if not 0 <= index < len(ex.intervals_s):
        raise DomainError(f"no interval {index}")
    intervals = list(ex.intervals_s)
    intervals[index] = seconds
    return replace(ex, intervals_s=tuple(intervals))


def trajectory(ex: Exercise, t_s: float) -> RetargetSet:
    """Interpolated pose at time t; out-of-range times clamp to the ends."""
    if not ex.playable():
        raise DomainError("exercise needs at least two keypoints")
    if t_s <= 0.0:
        return RetargetSet(dict(ex.keypoints[0]))
    clock = 0.0
    for i, interval in enumerate(ex.intervals_s):
        if t_s <= clock + interval:
            # clamp: accumulated float error must not push u past the ends
            u = min(max((t_s - clock) / interval, 0.0), 1.0)
            if u == 0.0:
                return RetargetSet(dict(ex.keypoints[i]))
            if u == 1.0:
                return RetargetSet(dict(ex.keypoints[i + 1]))
            a, b = ex.keypoints[i], ex.keypoints[i + 1]
            return RetargetSet({seg: slerp(a[seg], b[seg], u) for seg in SEGMENTS})
        clock += interval
    return RetargetSet(dict(ex.keypoints[-1]))


# -- Adherence scoring -----------------------------------------------------


@dataclass(frozen=True)
class AdherenceReport:
    """Per-repetition peak statistics for one angle channel."""

    target_deg: float
    rep_peaks: Tuple[float, ...]
    mean: Optional[float]
    std: Optional[float]

    @property
    def rep_count(self) -> int:
        return len(self.rep_peaks)

    def summary(self) -> str:
        if not self.rep_peaks:
            return f"target {self.target_deg:.2f} deg: no repetitions detected"
        spread = f"{self.std:.2f}" if self.std is not None else "n/a"
        return (f"target {self.target_deg:.2f} deg: {self.rep_count} reps, "
                f"peak ROM ({self.mean:.2f} +- {spread}) deg")


def mean_std(values: Sequence[float], sample: bool = True) -> Tuple[float, Optional[float]]:
    n = len(values)
    m = sum(values) / n
    div = n - 1 if sample else n
    if div == 0:
        return m, None
    var = sum((v - m) ** 2 for v in values) / div
    return m, math.sqrt(var)


def segment_reps(series: Sequence[float], threshold: float) -> List[float]:
    """Peak per repetition, where a repetition is one excursion above threshold."""
    peaks: List[float] = []
    in_rep = False
    peak = 0.0
    for value in series:
        if not in_rep:
            if value > threshold:
                in_rep = True
                peak = value
        else:
            if value > peak:
                peak = value
            if value < threshold:
                in_rep = False
                peaks.append(peak)
    if in_rep:
        peaks.append(peak)  # series ended mid-repetition
    return peaks


def score(series: Sequence[float], target_deg: float,
          open_fraction: float = DEFAULT_OPEN_FRACTION,
          sample_std: bool = True) -> AdherenceReport:
    """Adherence statistics of an angle series against a target amplitude."""
    if target_deg <= 0:
        raise DomainError("target must be positive")
    peaks = segment_reps(series, open_fraction * target_deg)
    if not peaks:
        return AdherenceReport(target_deg, (), None, None)
    m, s = mean_std(peaks, sample_std)
    return AdherenceReport(target_deg, tuple(peaks), m, s)


# -- Exercise files ---------------------------------------------------------


def save_exercise(ex: Exercise, fp: TextIO) -> None:
    fp.write(EXERCISE_HEADER + "\n")
    fp.write(f"#name={ex.name}\n")
    fp.write(f"#tick_hz={ex.tick_rate_hz:g}\n")
    for i, kp in enumerate(ex.keypoints):
        interval = ex.intervals_s[i] if i < len(ex.intervals_s) else 0.0
        scalars = []
        for seg in SEGMENTS:
            scalars += [f"{c:.6f}" for c in kp[seg].as_tuple()]
        fp.write(f"K,{interval:.3f}," + ",".join(scalars) + "\n")


def load_exercise(fp: TextIO) -> Exercise:
    header = fp.readline().rstrip("\n")
    if header != EXERCISE_HEADER:
        raise DomainError(f"not an exercise file (header {header!r})")
    meta: Dict[str, str] = {}
    keypoints: List[Mapping[SegmentId, UnitQuat]] = []
    intervals: List[float] = []
    for raw in fp:
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            meta[key] = value
            continue
        fields = line.split(",")
        if fields[0] != "K" or len(fields) != 22:
            raise DomainError(f"bad keypoint line: {line!r}")
        interval = float(fields[1])
        scalars = [float(f) for f in fields[2:]]
        kp = {seg: UnitQuat(*scalars[i * 4:i * 4 + 4]) for i, seg in enumerate(SEGMENTS)}
        keypoints.append(kp)
        intervals.append(interval)
    # the final keypoint carries a zero interval placeholder
    return Exercise(
        name=meta.get("name", "exercise"),
        keypoints=tuple(keypoints),
        intervals_s=tuple(intervals[:-1]) if keypoints else (),
        tick_rate_hz=float(meta.get("tick_hz", str(DEFAULT_TICK_HZ))),
    )
