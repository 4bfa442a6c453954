"""Clinical joint angles in the ISB joint coordinate system.

Shoulder angles are the rotation of each upper arm relative to a reference
built from the back sensor (the back rotated -90 degrees about its own Z);
elbow angles are each forearm relative to a reference built from the owning
arm (+90/-90 degrees about its own Y). Before the relative rotation is
formed, every participating frame is flipped 180 degrees about its
longitudinal axis so both sides share one sign convention: flexion,
abduction, internal rotation, and pronation are positive.

Shoulder decomposition uses the Y-Z-Y' sequence: plane of elevation,
elevation, and internal-external rotation reported as the sum of the first
and third angles. Elbow decomposition uses Z-X-Y: flexion-extension,
carrying angle, pronation-supination.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple

from .frames import SegmentId, SensorFrameSet
from .quat import (
    UnitQuat,
    Vec3,
    Y_AXIS,
    Z_AXIS,
    conjugate,
    from_axis_angle,
    from_euler,
    mul,
    rotate_vec,
    to_euler,
    wrap_deg,
)

CARRYING_RANGE_DEG = (8.0, 20.0)  # physiological carrying angle band


@dataclass(frozen=True)
class JcsConfig:
    """Tunable conventions; defaults match the shipped sign conventions.

    ``dagger_axes`` gives the per-segment local axis for the 180-degree
    sign-convention flip. ``rotation_is_sum`` selects whether shoulder
    internal-external rotation is reported as r1 + r3 of the Y-Z-Y' split
    (default) or as r3 alone.
    """

    dagger_axes: Mapping[SegmentId, Vec3] = field(
        default_factory=lambda: {seg: Z_AXIS for seg in SegmentId}
    )
    rotation_is_sum: bool = True


DEFAULT_CONFIG = JcsConfig()


@dataclass(frozen=True)
class JcsRefs:
    """Per-frame reference quaternions for the four measured joints."""

    q_lb_ref: UnitQuat
    q_rb_ref: UnitQuat
    q_la_ref: UnitQuat
    q_ra_ref: UnitQuat


@dataclass(frozen=True)
class SideAngles:
    """One side's clinical angles, degrees, sign convention as module doc."""

    shoulder_plane: float
    shoulder_elevation: float
    shoulder_rotation: float
    elbow_flexion: float
    carrying: float
    pronation: float
    shoulder_singular: bool = False
    elbow_singular: bool = False


@dataclass(frozen=True)
class JointAngles:
    """Both sides' angles for one frame."""

    left: SideAngles
    right: SideAngles

    def channel(self, name: str) -> float:
        side, _, rest = name.partition("_")
        if side not in ("l", "r"):
            raise KeyError(f"unknown angle channel {name!r}")
        return getattr(self.left if side == "l" else self.right, rest)


ANGLE_CHANNELS = tuple(
    f"{side}_{name}"
    for side in ("l", "r")
    for name in ("shoulder_plane", "shoulder_elevation", "shoulder_rotation",
                 "elbow_flexion", "carrying", "pronation")
)


def _axis_rotation(parent: UnitQuat, world_axis: Vec3, angle_deg: float) -> UnitQuat:
    return from_axis_angle(rotate_vec(parent, world_axis), angle_deg)


def make_refs(frames: SensorFrameSet) -> JcsRefs:
    """Recompute the joint reference frames from the current sensor frames."""
    q_b = frames.q(SegmentId.B)
    q_la = frames.q(SegmentId.LA)
    q_ra = frames.q(SegmentId.RA)
    b_ref = mul(_axis_rotation(q_b, Z_AXIS, -90.0), q_b)
    return JcsRefs(
        q_lb_ref=b_ref,
        q_rb_ref=b_ref,
        q_la_ref=mul(_axis_rotation(q_la, Y_AXIS, 90.0), q_la),
        q_ra_ref=mul(_axis_rotation(q_ra, Y_AXIS, -90.0), q_ra),
    )


def dagger(q: UnitQuat, segment: SegmentId, config: JcsConfig = DEFAULT_CONFIG) -> UnitQuat:
    """Flip a frame 180 degrees about its own sign-convention axis."""
    return mul(q, from_axis_angle(config.dagger_axes[segment], 180.0))


def shoulder_angles(frames: SensorFrameSet, config: JcsConfig = DEFAULT_CONFIG,
                    refs: Optional[JcsRefs] = None
                    ) -> Tuple[UnitQuat, UnitQuat, Dict[str, SideAngles]]:
    """Left and right shoulder joint quaternions plus extracted angles.

    At the Y-Z-Y' singularity (elevation near 0 or 180) the plane/rotation
    split is unobservable; the combined rotation lands in the first angle,
    the frame is flagged, and downstream keeps the flag with the sample.
    """
    refs = refs or make_refs(frames)
    q_ls = mul(conjugate(dagger(refs.q_lb_ref, SegmentId.B, config)),
               dagger(frames.q(SegmentId.LA), SegmentId.LA, config))
    q_rs = mul(conjugate(dagger(refs.q_rb_ref, SegmentId.B, config)),
               dagger(frames.q(SegmentId.RA), SegmentId.RA, config))
    out: Dict[str, SideAngles] = {}
    for key, q in (("l", q_ls), ("r", q_rs)):
        e = to_euler(q, "YZY")
        rotation = e.r1 + e.r3 if config.rotation_is_sum else e.r3
        out[key] = SideAngles(
            shoulder_plane=wrap_deg(e.r1),
            shoulder_elevation=e.r2,
            shoulder_rotation=wrap_deg(rotation),
            elbow_flexion=0.0, carrying=0.0, pronation=0.0,
            shoulder_singular=e.singular,
        )
    return q_ls, q_rs, out


def elbow_angles(frames: SensorFrameSet, config: JcsConfig = DEFAULT_CONFIG,
                 refs: Optional[JcsRefs] = None
                 ) -> Tuple[UnitQuat, UnitQuat, Dict[str, SideAngles]]:
    """Left and right elbow joint quaternions plus extracted angles."""
    refs = refs or make_refs(frames)
    q_le = mul(conjugate(dagger(refs.q_la_ref, SegmentId.LA, config)),
               dagger(frames.q(SegmentId.LF), SegmentId.LF, config))
    q_re = mul(conjugate(dagger(refs.q_ra_ref, SegmentId.RA, config)),
               dagger(frames.q(SegmentId.RF), SegmentId.RF, config))
    out: Dict[str, SideAngles] = {}
    for key, q in (("l", q_le), ("r", q_re)):
        e = to_euler(q, "ZXY")
        out[key] = SideAngles(
            shoulder_plane=0.0, shoulder_elevation=0.0, shoulder_rotation=0.0,
            elbow_flexion=wrap_deg(e.r1),
            carrying=wrap_deg(e.r2),
            pronation=wrap_deg(e.r3),
            elbow_singular=e.singular,
        )
    return q_le, q_re, out


def joint_angles(frames: SensorFrameSet, config: JcsConfig = DEFAULT_CONFIG) -> JointAngles:
    """Full twelve-angle snapshot for one frame set."""
    refs = make_refs(frames)
    _, _, shoulder = shoulder_angles(frames, config, refs)
    _, _, elbow = elbow_angles(frames, config, refs)
    sides = {}
    for key in ("l", "r"):
        s, e = shoulder[key], elbow[key]
        sides[key] = SideAngles(
            shoulder_plane=s.shoulder_plane,
            shoulder_elevation=s.shoulder_elevation,
            shoulder_rotation=s.shoulder_rotation,
            elbow_flexion=e.elbow_flexion,
            carrying=e.carrying,
            pronation=e.pronation,
            shoulder_singular=s.shoulder_singular,
            elbow_singular=e.elbow_singular,
        )
    return JointAngles(left=sides["l"], right=sides["r"])


def carrying_in_range(carrying_deg: float) -> bool:
    """True when the carrying angle is inside the physiological band."""
    lo, hi = CARRYING_RANGE_DEG
    return lo <= carrying_deg <= hi


def elevation_plane(plane_deg: float, tol_deg: float = 20.0) -> str:
    """Classify the plane of elevation: frontal near 0, sagittal near 90."""
    p = wrap_deg(plane_deg)
    if abs(p) <= tol_deg:
        return "FRONTAL"
    if abs(abs(p) - 90.0) <= tol_deg:
        return "SAGITTAL"
    return "MIXED"


def shoulder_target(plane: float, elevation: float, rotation: float) -> UnitQuat:
    """Shoulder joint quaternion realizing the given reported angles.

    Inverse of the Y-Z-Y' report: the third Euler angle is the reported
    rotation minus the plane angle, since rotation is reported as r1 + r3.
    """
    return from_euler(plane, elevation, rotation - plane, "YZY")


def elbow_target(flexion: float, carrying: float, pronation: float) -> UnitQuat:
    """Elbow joint quaternion realizing the given reported angles."""
    return from_euler(flexion, carrying, pronation, "ZXY")
