"""Joint angle computation against the simulator oracle and sign rules."""

import math
import random

import pytest

from wise.frames import SEGMENTS, SegmentId, SensorFrameSet
from wise.jcs import (ANGLE_CHANNELS, JcsConfig, carrying_in_range, dagger,
                      elbow_angles, elevation_plane, joint_angles, make_refs,
                      shoulder_angles)
from wise.quat import (UnitQuat, Y_AXIS, Z_AXIS, approx_equal,
                       from_axis_angle, mul)
from wise.simulate import MotionScript, ScriptSegment, synthesize

IDENT = UnitQuat(1, 0, 0, 0)


def random_unit(rng):
    while True:
        c = [rng.gauss(0, 1) for _ in range(4)]
        n = math.sqrt(sum(v * v for v in c))
        if n > 1e-3:
            return UnitQuat(*(v / n for v in c))


def pose_script(**channels):
    # elevation must rise before the plane/rotation channels move, or the
    # script would pass through the degenerate arm-down plane rotation
    carrying = channels.pop("carrying", 0.0)
    ordered = sorted(channels.items(), key=lambda kv: 0 if "elevation" in kv[0] else 1)
    segments = tuple(ScriptSegment(name, 0.0, value, 1000) for name, value in ordered)
    return MotionScript(segments=segments, carrying_deg=carrying)


def pose_frames(**channels):
    script = pose_script(**channels)
    fs, _ = synthesize(script, script.duration_ms or 1)
    return fs


class TestRefs:
    def test_back_ref_at_identity(self):
        fs = SensorFrameSet(0, {seg: IDENT for seg in SEGMENTS})
        refs = make_refs(fs)
        expected = from_axis_angle(Z_AXIS, -90.0)
        assert approx_equal(refs.q_rb_ref, expected, 1e-12)
        assert approx_equal(refs.q_lb_ref, expected, 1e-12)

    def test_arm_refs_at_identity(self):
        fs = SensorFrameSet(0, {seg: IDENT for seg in SEGMENTS})
        refs = make_refs(fs)
        assert approx_equal(refs.q_la_ref, from_axis_angle(Y_AXIS, 90.0), 1e-12)
        assert approx_equal(refs.q_ra_ref, from_axis_angle(Y_AXIS, -90.0), 1e-12)

    def test_refs_unit_for_random_inputs(self):
        rng = random.Random(21)
        for _ in range(50):
            fs = SensorFrameSet(0, {seg: random_unit(rng) for seg in SEGMENTS})
            refs = make_refs(fs)
            for q in (refs.q_lb_ref, refs.q_rb_ref, refs.q_la_ref, refs.q_ra_ref):
                assert abs(math.sqrt(sum(c * c for c in q.as_tuple())) - 1) < 1e-9


class TestDagger:
    def test_involution_up_to_sign(self):
        rng = random.Random(22)
        for _ in range(50):
            q = random_unit(rng)
            assert approx_equal(dagger(dagger(q, SegmentId.LA), SegmentId.LA), q, 1e-12)

    def test_identity_default_axis(self):
        assert approx_equal(dagger(IDENT, SegmentId.LA), UnitQuat(0, 0, 0, 1), 1e-12)

    def test_abduction_sign_positive(self):
        fs = pose_frames(l_shoulder_elevation=30.0)
        ja = joint_angles(fs)
        assert ja.left.shoulder_elevation > 29.999


class TestShoulder:
    def test_neutral_pose_zero(self):
        fs = pose_frames()
        ja = joint_angles(fs)
        for side in (ja.left, ja.right):
            assert abs(side.shoulder_plane) < 1e-6
            assert abs(side.shoulder_elevation) < 1e-6
            assert abs(side.shoulder_rotation) < 1e-6
            assert side.shoulder_singular  # neutral sits on the YZY degeneracy

    def test_frontal_abduction_90(self):
        fs = pose_frames(l_shoulder_elevation=90.0)
        ja = joint_angles(fs)
        assert abs(ja.left.shoulder_plane) < 1e-6
        assert abs(ja.left.shoulder_elevation - 90.0) < 1e-6
        assert not ja.left.shoulder_singular

    def test_pure_internal_rotation(self):
        fs = pose_frames(l_shoulder_rotation=20.0)
        ja = joint_angles(fs)
        assert abs(ja.left.shoulder_rotation - 20.0) < 1e-6
        assert abs(ja.left.shoulder_elevation) < 1e-6
        assert ja.left.shoulder_singular

    def test_rotation_sum_vs_third_mode(self):
        fs = pose_frames(l_shoulder_plane=25.0, l_shoulder_elevation=60.0,
                         l_shoulder_rotation=10.0)
        sum_mode = joint_angles(fs)
        third_mode = joint_angles(fs, JcsConfig(rotation_is_sum=False))
        assert abs(sum_mode.left.shoulder_rotation - 10.0) < 1e-6
        # r3 alone = rotation - plane
        assert abs(third_mode.left.shoulder_rotation - (10.0 - 25.0)) < 1e-6

    def test_joint_quats_unit(self):
        rng = random.Random(23)
        for _ in range(30):
            fs = SensorFrameSet(0, {seg: random_unit(rng) for seg in SEGMENTS})
            q_ls, q_rs, _ = shoulder_angles(fs)
            q_le, q_re, _ = elbow_angles(fs)
            for q in (q_ls, q_rs, q_le, q_re):
                assert abs(math.sqrt(sum(c * c for c in q.as_tuple())) - 1) < 1e-9


class TestElbow:
    def test_neutral_with_builtin_carrying(self):
        fs = pose_frames(carrying=12.0)
        ja = joint_angles(fs)
        for side in (ja.left, ja.right):
            assert abs(side.carrying - 12.0) < 1e-6
            assert abs(side.elbow_flexion) < 1e-6
            assert abs(side.pronation) < 1e-6
            assert not side.elbow_singular

    def test_flexion_90(self):
        fs = pose_frames(l_elbow_flexion=90.0, carrying=12.0)
        ja = joint_angles(fs)
        assert abs(ja.left.elbow_flexion - 90.0) < 1e-6
        assert abs(ja.right.elbow_flexion) < 1e-6

    def test_pronation_sign(self):
        fs = pose_frames(r_pronation=40.0)
        ja = joint_angles(fs)
        assert abs(ja.right.pronation - 40.0) < 1e-6


class TestProperties:
    def test_full_round_trip(self):
        rng = random.Random(24)
        for _ in range(100):
            target = {
                "l_shoulder_plane": rng.uniform(-85, 85),
                "l_shoulder_elevation": rng.uniform(5, 175),
                "l_shoulder_rotation": rng.uniform(-85, 85),
                "l_elbow_flexion": rng.uniform(-10, 150),
                "l_pronation": rng.uniform(-80, 80),
                "r_shoulder_plane": rng.uniform(-85, 85),
                "r_shoulder_elevation": rng.uniform(5, 175),
                "r_shoulder_rotation": rng.uniform(-85, 85),
                "r_elbow_flexion": rng.uniform(-10, 150),
                "r_pronation": rng.uniform(-80, 80),
                "carrying": rng.uniform(8, 20),
            }
            fs = pose_frames(**target)
            ja = joint_angles(fs)
            carrying = target.pop("carrying")
            for name, expected in target.items():
                assert abs(ja.channel(name) - expected) < 1e-6, name
            assert abs(ja.left.carrying - carrying) < 1e-6
            assert abs(ja.right.carrying - carrying) < 1e-6

    def test_global_yaw_invariance(self):
        fs = pose_frames(l_shoulder_elevation=40.0, r_elbow_flexion=70.0, carrying=10.0)
        base = joint_angles(fs)
        yaw = from_axis_angle(Z_AXIS, -63.0)
        turned = joint_angles(fs.with_quats(
            {seg: mul(yaw, fs.q(seg)) for seg in SEGMENTS}))
        for ch in ANGLE_CHANNELS:
            assert abs(base.channel(ch) - turned.channel(ch)) < 1e-9

    def test_abduction_monotone(self):
        previous = -1.0
        for deg in range(0, 91, 5):
            fs = pose_frames(l_shoulder_elevation=float(deg) if deg else 0.001)
            ja = joint_angles(fs)
            assert ja.left.shoulder_elevation > previous
            previous = ja.left.shoulder_elevation


class TestPredicates:
    @pytest.mark.parametrize("value,expected", [
        (8.0, True), (20.0, True), (12.0, True),
        (7.9, False), (20.1, False), (0.0, False),
    ])
    def test_carrying_band(self, value, expected):
        assert carrying_in_range(value) is expected

    def test_elevation_plane_classification(self):
        assert elevation_plane(0.0) == "FRONTAL"
        assert elevation_plane(90.0) == "SAGITTAL"
        assert elevation_plane(-88.0) == "SAGITTAL"
        assert elevation_plane(45.0) == "MIXED"
