"""Motion script evaluation, file round trips, and load-time validation."""

import io

import pytest

from wise.frames import SegmentId
from wise.jcs import joint_angles
from wise.quat import DomainError, approx_equal
from wise.simulate import (MotionScript, ScriptSegment, load_script,
                           longitudinal_mount_offset, save_script, synthesize)


class TestSegments:
    def test_linear_easing(self):
        seg = ScriptSegment("l_shoulder_elevation", 0, 90, 3000)
        assert seg.value(0.5) == 45.0

    def test_smooth_easing(self):
        seg = ScriptSegment("l_shoulder_elevation", 0, 90, 3000, "SMOOTH")
        assert seg.value(0.0) == 0.0
        assert seg.value(1.0) == 90.0
        assert seg.value(0.5) == 45.0  # smoothstep is symmetric
        assert seg.value(0.25) < 22.5  # slower start than linear

    def test_bad_channel(self):
        with pytest.raises(DomainError):
            ScriptSegment("wrist_flexion", 0, 10, 100)

    def test_bad_duration(self):
        with pytest.raises(DomainError):
            ScriptSegment("l_carrying", 0, 10, 0)


class TestTimeline:
    def test_sequential_evaluation(self):
        script = MotionScript(segments=(
            ScriptSegment("l_shoulder_elevation", 0, 90, 3000),
            ScriptSegment("l_elbow_flexion", 0, 60, 2000),
        ))
        v = script.channel_values(1500)
        assert v["l_shoulder_elevation"] == 45.0
        assert v["l_elbow_flexion"] == 0.0
        v = script.channel_values(4000)
        assert v["l_shoulder_elevation"] == 90.0
        assert v["l_elbow_flexion"] == 30.0
        v = script.channel_values(99999)  # clamps to the end
        assert v["l_elbow_flexion"] == 60.0

    def test_abduction_midpoint(self):
        script = MotionScript(segments=(
            ScriptSegment("l_shoulder_elevation", 0, 90, 3000),))
        fs, _ = synthesize(script, 1500)
        ja = joint_angles(fs)
        assert abs(ja.left.shoulder_elevation - 45.0) < 1e-6

    def test_carrying_recovered_at_every_tick(self):
        script = MotionScript(segments=(
            ScriptSegment("r_shoulder_elevation", 0, 60, 1000),),
            carrying_deg=12.0)
        for t in script.tick_times():
            fs, _ = synthesize(script, t)
            ja = joint_angles(fs)
            assert abs(ja.left.carrying - 12.0) < 1e-6
            assert abs(ja.right.carrying - 12.0) < 1e-6

    def test_tick_times_cover_duration(self):
        script = MotionScript(segments=(
            ScriptSegment("l_carrying", 12, 14, 1000),), frame_rate_hz=50)
        times = list(script.tick_times())
        assert times[0] == 0
        assert times[-1] == 1000
        assert len(times) == 51


class TestValidation:
    def test_all_zero_script_accepted(self):
        script = MotionScript()
        fs, gt = synthesize(script, 0)
        ja = joint_angles(fs)
        for side in (ja.left, ja.right):
            assert abs(side.shoulder_elevation) < 1e-6
            assert abs(side.elbow_flexion) < 1e-6

    def test_plane_at_zero_elevation_rejected(self):
        with pytest.raises(DomainError):
            MotionScript(segments=(
                ScriptSegment("l_shoulder_plane", 0, 30, 1000),))

    def test_carrying_90_rejected(self):
        with pytest.raises(DomainError):
            MotionScript(segments=(
                ScriptSegment("l_carrying", 0, 90, 1000),))

    def test_pure_rotation_allowed(self):
        MotionScript(segments=(
            ScriptSegment("l_shoulder_rotation", 0, 20, 1000),))

    def test_frame_rate_bounds(self):
        with pytest.raises(DomainError):
            MotionScript(frame_rate_hz=5)
        with pytest.raises(DomainError):
            MotionScript(frame_rate_hz=500)


class TestGroundTruth:
    def test_truth_angles_match_script(self):
        script = MotionScript(segments=(
            ScriptSegment("l_shoulder_elevation", 0, 80, 2000),
            ScriptSegment("l_shoulder_plane", 0, 30, 1000),),
            carrying_deg=10.0)
        _, gt = synthesize(script, 2500)
        assert gt.angles.left.shoulder_elevation == 80.0
        assert gt.angles.left.shoulder_plane == 15.0
        assert gt.angles.left.carrying == 10.0

    def test_truth_flags_neutral(self):
        _, gt = synthesize(MotionScript(), 0)
        assert gt.angles.left.shoulder_singular
        assert not gt.angles.left.elbow_singular


class TestCalibLevels:
    def test_default_fully_calibrated(self):
        script = MotionScript()
        assert script.levels_at(0).complete

    def test_stepped_levels(self):
        script = MotionScript(calib_steps=((0, 0, 0, 0), (10000, 3, 0, 0),
                                           (20000, 3, 3, 0), (30000, 3, 3, 3)))
        assert script.levels_at(0).gyro == 0
        assert script.levels_at(15000).gyro == 3
        assert script.levels_at(15000).accel == 0
        assert script.levels_at(30000).complete
        assert not script.levels_at(29999).complete


class TestMountOffsets:
    def test_offset_shifts_rotation_reading(self):
        for delta in (-20.0, -5.0, 5.0, 15.0):
            script = MotionScript(carrying_deg=12.0, mounting_offsets={
                SegmentId.LA: longitudinal_mount_offset(delta)})
            fs, _ = synthesize(script, 0)
            ja = joint_angles(fs)
            assert abs(ja.left.shoulder_rotation - delta) < 1e-6

    def test_truth_angles_are_scripted_not_sensed(self):
        script = MotionScript(mounting_offsets={
            SegmentId.LA: longitudinal_mount_offset(10.0)})
        _, gt = synthesize(script, 0)
        assert gt.angles.left.shoulder_rotation == 0.0


class TestScriptFiles:
    def test_round_trip(self):
        script = MotionScript(
            segments=(ScriptSegment("l_shoulder_elevation", 0, 90, 3000),
                      ScriptSegment("l_shoulder_elevation", 90, 0, 3000, "SMOOTH")),
            frame_rate_hz=100.0, carrying_deg=12.0, base_yaw_deg=15.0,
            mounting_offsets={SegmentId.RA: longitudinal_mount_offset(7.0)},
            calib_steps=((0, 0, 0, 0), (5000, 3, 3, 3)),
        )
        buf = io.StringIO()
        save_script(script, buf)
        buf.seek(0)
        loaded = load_script(buf)
        assert loaded.segments == script.segments
        assert loaded.frame_rate_hz == script.frame_rate_hz
        assert loaded.carrying_deg == script.carrying_deg
        assert loaded.base_yaw_deg == script.base_yaw_deg
        assert loaded.calib_steps == script.calib_steps
        assert approx_equal(loaded.mounting_offsets[SegmentId.RA],
                            script.mounting_offsets[SegmentId.RA], 1e-8)

    def test_bad_header(self):
        with pytest.raises(DomainError):
            load_script(io.StringIO("#NOT-A-SCRIPT\n"))

    def test_bad_line(self):
        with pytest.raises(DomainError):
            load_script(io.StringIO("#WISE-SCRIPT v1\nX,what,1\n"))
