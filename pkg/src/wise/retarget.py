"""World-frame sensor orientations to avatar-ready relative rotations.

Two stages. First, each segment's absolute orientation is re-expressed
relative to a transformed parent frame (back for the arms, arm for the
forearms, back for itself), where the parent transform is a fixed rotation
about one of the parent's current axes: 180 degrees about the back's Z for
the left arm, +90/-90 degrees about the owning arm's Y for the forearms,
and +90 degrees about the back's own Y for the back. Second, the resulting
right-handed quaternions are remapped into the left-handed convention the
rendering side consumes, by axis permutation and angle negation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Mapping, Optional

from .frames import SEGMENTS, SegmentId, SensorFrameSet
from .quat import (
    UnitQuat,
    Vec3,
    Y_AXIS,
    Z_AXIS,
    from_axis_angle,
    inverse,
    mul,
    rotate_vec,
    to_axis_angle,
)


@dataclass(frozen=True)
class RetargetSet:
    """Relative rotations per segment: right-handed, plus the left-handed image."""

    q_tilde: Mapping[SegmentId, UnitQuat]
    q_acute: Optional[Mapping[SegmentId, UnitQuat]] = None


def correct(raw: SensorFrameSet, offsets: Optional[Mapping[SegmentId, UnitQuat]] = None) -> SensorFrameSet:
    """Apply fixed per-segment correction offsets: q_hat = q_raw ⊗ offset.

    Offsets come from the operator profile and default to identity. The hook
    keeps the pipeline shape when an upstream correction stage is wanted.
    """
    if not offsets:
        return raw
    corrected = {
        seg: mul(raw.q(seg), offsets[seg]) if seg in offsets else raw.q(seg)
        for seg in SEGMENTS
    }
    return raw.with_quats(corrected)


def _axis_rotation(parent: UnitQuat, world_axis: Vec3, angle_deg: float) -> UnitQuat:
    """Rotation by angle_deg about the parent's current image of a world axis."""
    return from_axis_angle(rotate_vec(parent, world_axis), angle_deg)


def retarget(frames: SensorFrameSet) -> RetargetSet:
    """Compute the five relative quaternions from one frame set.

    The parent-axis rotations are recomputed every frame because the back
    and arm orientations change every frame.
    """
    q_b = frames.q(SegmentId.B)
    q_la = frames.q(SegmentId.LA)
    q_ra = frames.q(SegmentId.RA)

    la_trans = mul(_axis_rotation(q_b, Z_AXIS, 180.0), q_b)
    lf_trans = mul(_axis_rotation(q_la, Y_AXIS, 90.0), q_la)
    rf_trans = mul(_axis_rotation(q_ra, Y_AXIS, -90.0), q_ra)
    b_trans = mul(_axis_rotation(q_b, Y_AXIS, 90.0), q_b)

    q_tilde = {
        SegmentId.B: mul(inverse(b_trans), q_b),
        SegmentId.LA: mul(inverse(la_trans), q_la),
        SegmentId.RA: mul(inverse(q_b), q_ra),
        SegmentId.LF: mul(inverse(lf_trans), frames.q(SegmentId.LF)),
        SegmentId.RF: mul(inverse(rf_trans), frames.q(SegmentId.RF)),
    }
    return RetargetSet(q_tilde)


# Axis remap into the left-handed convention, per segment: each row maps the
# right-handed rotation axis (Vx, Vy, Vz) to its left-handed image.
_LEFT_HAND_REMAP = {
    SegmentId.LA: lambda v: Vec3(-v.y, v.x, -v.z),
    SegmentId.RA: lambda v: Vec3(v.y, -v.x, -v.z),
    SegmentId.LF: lambda v: Vec3(-v.y, v.z, v.x),
    SegmentId.RF: lambda v: Vec3(v.y, v.z, -v.x),
    SegmentId.B: lambda v: Vec3(v.y, -v.x, -v.z),
}


def to_left_handed(rt: RetargetSet) -> RetargetSet:
    """Populate the left-handed quaternions from the right-handed ones.

    Per segment: extract (axis, angle), permute the axis through the
    segment's remap row, rebuild with the negated angle.
    """
    q_acute: Dict[SegmentId, UnitQuat] = {}
    for seg in SEGMENTS:
        axis, angle = to_axis_angle(rt.q_tilde[seg])
        q_acute[seg] = from_axis_angle(_LEFT_HAND_REMAP[seg](axis), -angle)
    return RetargetSet(rt.q_tilde, q_acute)


def frames_from_retarget(rt: RetargetSet, q_base: UnitQuat = UnitQuat(1, 0, 0, 0),
                         t_ms: int = 0) -> SensorFrameSet:
    """Reconstruct world-frame orientations that retarget back to ``rt``.

    The back's relative quaternion is a constant of the construction, so the
    absolute back orientation is not recoverable; ``q_base`` supplies it.
    Used to drive the kinematics pipeline from authored poses.
    """
    q_la = mul(mul(q_base, from_axis_angle(Z_AXIS, 180.0)), rt.q_tilde[SegmentId.LA])
    q_ra = mul(q_base, rt.q_tilde[SegmentId.RA])
    quats = {
        SegmentId.B: q_base,
        SegmentId.LA: q_la,
        SegmentId.RA: q_ra,
        SegmentId.LF: mul(mul(q_la, from_axis_angle(Y_AXIS, 90.0)), rt.q_tilde[SegmentId.LF]),
        SegmentId.RF: mul(mul(q_ra, from_axis_angle(Y_AXIS, -90.0)), rt.q_tilde[SegmentId.RF]),
    }
    return SensorFrameSet(t_ms, quats)
