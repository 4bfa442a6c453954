"""Deterministic motion simulator: scripted joint angles to sensor frames.

A script animates named joint-angle channels over a sequential timeline.
For any instant the simulator builds the five world-frame quaternions whose
forward pipeline (retarget, joint angles) recovers exactly the scripted
values, and keeps the closed-form ground truth alongside. Mounting errors
are modeled as fixed rotations appended to a segment's true orientation.

The construction inverts the measurement chain in closed form. With
``qz/qy`` rotations about base axes and ``T``/``E`` the shoulder and elbow
joint quaternions built from the scripted angles:

    arm      = back * qz(90) * T * qz(-180)
    forearm  = arm * qy(+-90) * qz(180) * E * qz(-180)

and the ground-truth relative rotations reduce to

    back~ = qy(-90)            arm_left~  = qz(-180) * back^-1 * arm
    arm_right~ = back^-1 * arm forearm~   = qy(-+90) * arm^-1 * forearm

which checks the production path's per-frame axis construction against an
algebraically independent derivation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, TextIO, Tuple

from .frames import CalibStatus, SegmentId, SensorFrameSet
from .jcs import ANGLE_CHANNELS, JointAngles, SideAngles, elbow_target, shoulder_target
from .quat import DomainError, UnitQuat, Vec3, from_axis_angle, inverse, mul
from .retarget import RetargetSet

EASINGS = ("LINEAR", "SMOOTH")
FRAME_RATE_RANGE = (10.0, 200.0)
_SING_PLANE_TOL = 1e-9


@dataclass(frozen=True)
class ScriptSegment:
    """One timeline step: a single channel moves start -> end over duration."""

    channel: str
    start_deg: float
    end_deg: float
    duration_ms: int
    easing: str = "LINEAR"

    def __post_init__(self) -> None:
        if self.channel not in ANGLE_CHANNELS:
            raise DomainError(f"unknown angle channel {self.channel!r}")
        if self.duration_ms <= 0:
            raise DomainError("segment duration must be positive")
        if self.easing not in EASINGS:
            raise DomainError(f"easing must be one of {EASINGS}")

    def value(self, u: float) -> float:
        if self.easing == "SMOOTH":
            u = u * u * (3.0 - 2.0 * u)  # smoothstep
        return self.start_deg + (self.end_deg - self.start_deg) * u


@dataclass(frozen=True)
class GroundTruth:
    """What the pipeline must recover from a synthesized frame set."""

    angles: JointAngles
    retarget: RetargetSet


@dataclass(frozen=True)
class MotionScript:
    """Sequential channel animation plus static pose/mounting parameters.

    Channels not animated hold their most recent value (initially zero,
    except carrying which starts at ``carrying_deg`` on both sides).
    ``calib_steps`` schedules the calibration levels reported with each
    frame; without any step the stream reports fully calibrated modules.
    """

    segments: Tuple[ScriptSegment, ...] = ()
    frame_rate_hz: float = 50.0
    carrying_deg: float = 0.0
    base_yaw_deg: float = 0.0
    mounting_offsets: Mapping[SegmentId, UnitQuat] = field(default_factory=dict)
    calib_steps: Tuple[Tuple[int, int, int, int], ...] = ()

    def __post_init__(self) -> None:
        lo, hi = FRAME_RATE_RANGE
        if not lo <= self.frame_rate_hz <= hi:
            raise DomainError(f"frame rate must be in [{lo}, {hi}] Hz")
        _reject_singular_targets(self)

    @property
    def duration_ms(self) -> int:
        return sum(s.duration_ms for s in self.segments)

    @property
    def tick_ms(self) -> float:
        return 1000.0 / self.frame_rate_hz

    def channel_values(self, t_ms: float) -> Dict[str, float]:
        """Evaluate every angle channel at time t (clamped to the timeline)."""
        values = {ch: 0.0 for ch in ANGLE_CHANNELS}
        values["l_carrying"] = self.carrying_deg
        values["r_carrying"] = self.carrying_deg
        clock = 0.0
        for seg in self.segments:
            if t_ms <= clock:
                break
            local = min(t_ms - clock, seg.duration_ms)
            values[seg.channel] = seg.value(local / seg.duration_ms)
            clock += seg.duration_ms
        return values

    def levels_at(self, t_ms: float) -> CalibStatus:
        if not self.calib_steps:
            return CalibStatus(3, 3, 3)
        g = a = m = 0
        for step_t, sg, sa, sm in self.calib_steps:
            if t_ms >= step_t:
                g, a, m = sg, sa, sm
        return CalibStatus(g, a, m)

    def tick_times(self) -> Iterable[int]:
        """Frame timestamps covering the whole timeline, including the end."""
        n = int(math.floor(self.duration_ms / self.tick_ms + 1e-9))
        for i in range(n + 1):
            yield int(round(i * self.tick_ms))

    def synthesize(self, t_ms: float) -> Tuple[SensorFrameSet, GroundTruth]:
        return synthesize(self, t_ms)


def _reject_singular_targets(script: MotionScript) -> None:
    """Refuse scripts whose angles cannot survive the Euler round trip.

    Shoulder elevation at 0 or 180 makes the plane angle unobservable, so
    it is allowed only with a zero plane target (pure rotation stays
    recoverable as the combined angle). Carrying at +-90 is always out.
    """
    t = 0.0
    step = script.tick_ms
    end = script.duration_ms
    while True:
        v = script.channel_values(t)
        for side in ("l", "r"):
            elev = abs(v[f"{side}_shoulder_elevation"])
            on_singularity = min(elev % 360.0, abs(elev % 360.0 - 180.0)) < 1e-7
            if on_singularity and abs(v[f"{side}_shoulder_plane"]) > _SING_PLANE_TOL:
                raise DomainError(
                    f"{side} shoulder plane target is unobservable at elevation {elev:g}"
                )
            if abs(abs(v[f"{side}_carrying"]) - 90.0) < 1e-7:
                raise DomainError(f"{side} carrying target of +-90 degrees is degenerate")
        if t >= end:
            break
        t = min(t + step, end)


def _qz(deg: float) -> UnitQuat:
    return from_axis_angle(Vec3(0.0, 0.0, 1.0), deg)


def _qy(deg: float) -> UnitQuat:
    return from_axis_angle(Vec3(0.0, 1.0, 0.0), deg)


def longitudinal_mount_offset(delta_deg: float) -> UnitQuat:
    """Arm-sensor mounting error of delta about the arm's long axis.

    The distal direction of the arm sensor's long axis is its -Y, so a
    positive delta reads as internal (+) rotation at the shoulder.
    """
    return from_axis_angle(Vec3(0.0, -1.0, 0.0), delta_deg)


def synthesize(script: MotionScript, t_ms: float) -> Tuple[SensorFrameSet, GroundTruth]:
    """Sensor frames plus ground truth at one instant of the script."""
    v = script.channel_values(t_ms)
    q_b = _qz(script.base_yaw_deg)

    true_quats: Dict[SegmentId, UnitQuat] = {SegmentId.B: q_b}
    for side, arm, fore in (("l", SegmentId.LA, SegmentId.LF),
                            ("r", SegmentId.RA, SegmentId.RF)):
        t_sh = shoulder_target(v[f"{side}_shoulder_plane"],
                               v[f"{side}_shoulder_elevation"],
                               v[f"{side}_shoulder_rotation"])
        q_arm = mul(mul(mul(q_b, _qz(90.0)), t_sh), _qz(-180.0))
        e_el = elbow_target(v[f"{side}_elbow_flexion"], v[f"{side}_carrying"],
                            v[f"{side}_pronation"])
        hinge = _qy(90.0) if side == "l" else _qy(-90.0)
        q_fore = mul(mul(mul(mul(q_arm, hinge), _qz(180.0)), e_el), _qz(-180.0))
        true_quats[arm] = q_arm
        true_quats[fore] = q_fore

    sensed = {
        seg: mul(q, script.mounting_offsets[seg]) if seg in script.mounting_offsets else q
        for seg, q in true_quats.items()
    }
    levels = script.levels_at(t_ms)
    frames = SensorFrameSet(int(round(t_ms)), sensed, {seg: levels for seg in sensed})
    return frames, GroundTruth(_truth_angles(v), _truth_retarget(sensed))


def _truth_angles(v: Mapping[str, float]) -> JointAngles:
    sides = {}
    for side in ("l", "r"):
        elev = v[f"{side}_shoulder_elevation"]
        sides[side] = SideAngles(
            shoulder_plane=v[f"{side}_shoulder_plane"],
            shoulder_elevation=elev,
            shoulder_rotation=v[f"{side}_shoulder_rotation"],
            elbow_flexion=v[f"{side}_elbow_flexion"],
            carrying=v[f"{side}_carrying"],
            pronation=v[f"{side}_pronation"],
            shoulder_singular=min(abs(elev) % 360.0, abs(abs(elev) % 360.0 - 180.0)) < 1e-7,
            elbow_singular=abs(abs(v[f"{side}_carrying"]) - 90.0) < 1e-7,
        )
    return JointAngles(left=sides["l"], right=sides["r"])


def _truth_retarget(sensed: Mapping[SegmentId, UnitQuat]) -> RetargetSet:
    q_b = sensed[SegmentId.B]
    q_la = sensed[SegmentId.LA]
    q_ra = sensed[SegmentId.RA]
    return RetargetSet({
        SegmentId.B: _qy(-90.0),
        SegmentId.LA: mul(_qz(-180.0), mul(inverse(q_b), q_la)),
        SegmentId.RA: mul(inverse(q_b), q_ra),
        SegmentId.LF: mul(_qy(-90.0), mul(inverse(q_la), sensed[SegmentId.LF])),
        SegmentId.RF: mul(_qy(90.0), mul(inverse(q_ra), sensed[SegmentId.RF])),
    })


# -- Script files --------------------------------------------------------

SCRIPT_HEADER = "#WISE-SCRIPT v1"


def save_script(script: MotionScript, fp: TextIO) -> None:
    fp.write(SCRIPT_HEADER + "\n")
    fp.write(f"#frame_rate_hz={script.frame_rate_hz:g}\n")
    fp.write(f"#carrying_deg={script.carrying_deg:g}\n")
    if script.base_yaw_deg:
        fp.write(f"#base_yaw_deg={script.base_yaw_deg:g}\n")
    for seg_id, q in script.mounting_offsets.items():
        fp.write(f"#mount_offset={seg_id.value},{q.w:.9f},{q.x:.9f},{q.y:.9f},{q.z:.9f}\n")
    for t, g, a, m in script.calib_steps:
        fp.write(f"C,{t},{g},{a},{m}\n")
    for s in script.segments:
        fp.write(f"S,{s.channel},{s.start_deg:g},{s.end_deg:g},{s.duration_ms},{s.easing}\n")


def load_script(fp: TextIO) -> MotionScript:
    header = fp.readline().rstrip("\n")
    if header != SCRIPT_HEADER:
        raise DomainError(f"not a motion script (header {header!r})")
    meta: Dict[str, str] = {}
    offsets: Dict[SegmentId, UnitQuat] = {}
    segments: List[ScriptSegment] = []
    calib_steps: List[Tuple[int, int, int, int]] = []
    for raw in fp:
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            if key == "mount_offset":
                seg_name, *comps = value.split(",")
                if len(comps) != 4:
                    raise DomainError(f"mount_offset needs 4 components: {line!r}")
                offsets[SegmentId(seg_name)] = UnitQuat(*(float(c) for c in comps))
            else:
                meta[key] = value
            continue
        fields = line.split(",")
        if fields[0] == "S" and len(fields) == 6:
            segments.append(ScriptSegment(fields[1], float(fields[2]), float(fields[3]),
                                          int(fields[4]), fields[5]))
        elif fields[0] == "C" and len(fields) == 5:
            calib_steps.append((int(fields[1]), int(fields[2]), int(fields[3]), int(fields[4])))
        else:
            raise DomainError(f"bad script line: {line!r}")
    return MotionScript(
        segments=tuple(segments),
        frame_rate_hz=float(meta.get("frame_rate_hz", "50")),
        carrying_deg=float(meta.get("carrying_deg", "0")),
        base_yaw_deg=float(meta.get("base_yaw_deg", "0")),
        mounting_offsets=offsets,
        calib_steps=tuple(sorted(calib_steps)),
    )
