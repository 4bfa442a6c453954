"""Command-line workflows, exit codes, and the simulate/record/score loop."""

import io
import subprocess
import sys

import pytest

from wise.cli import main
from wise.session import load_session
from wise.simulate import MotionScript, ScriptSegment, save_script
from wise.wire import render_game_frame, GameFrame


def write_script(path, script):
    with open(path, "w") as fp:
        save_script(script, fp)
    return str(path)


def abduction_script(peak=90.0, carrying=12.0):
    return MotionScript(segments=(
        ScriptSegment("l_shoulder_elevation", 0.0, peak, 2000),
        ScriptSegment("l_shoulder_elevation", peak, 0.0, 2000),
    ), carrying_deg=carrying)


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


class TestSimulateRecordScore:
    def test_end_to_end_loop(self, workdir, capsys):
        script = write_script(workdir / "abd.wise-script", abduction_script())
        assert main(["simulate", "--script", script, "--out", "frames.txt"]) == 0
        assert main(["record", "--source", "frames.txt", "--out", "abd.wise-session",
                     "--subject", "s01"]) == 0
        assert main(["score", "abd.wise-session", "--target", "90",
                     "--channel", "l_shoulder_elevation"]) == 0
        out = capsys.readouterr().out
        lines = dict(line.split(": ", 1) for line in out.strip().split("\n")
                     if ": " in line)
        assert lines["reps"] == "1"
        assert abs(float(lines["mean_deg"]) - 90.0) < 0.01

    def test_recorded_session_loads(self, workdir):
        script = write_script(workdir / "abd.wise-script", abduction_script())
        main(["simulate", "--script", script, "--out", "frames.txt"])
        main(["record", "--source", "frames.txt", "--out", "s.wise-session"])
        with open("s.wise-session") as fp:
            session = load_session(fp)
        assert len(session.rows) == 201  # 4 s at 50 Hz inclusive
        assert session.meta["subject"] == "anonymous"

    def test_simulate_no_crc(self, workdir):
        script = write_script(workdir / "abd.wise-script", abduction_script())
        main(["simulate", "--script", script, "--out", "frames.txt", "--no-crc"])
        first = open("frames.txt").readline()
        assert "*" not in first


class TestCalibrate:
    def test_ready_stream_exits_zero(self, workdir, capsys):
        script = MotionScript(calib_steps=((0, 0, 0, 0), (30_000, 3, 3, 3)))
        path = write_script(workdir / "cal.wise-script", script)
        # pad the timeline so frames continue past readiness
        with open(path) as fp:
            text = fp.read()
        with open(path, "w") as fp:
            fp.write(text + "S,l_carrying,12,12,35000,LINEAR\n")
        main(["simulate", "--script", path, "--out", "frames.txt"])
        assert main(["calibrate", "--source", "frames.txt"]) == 0
        out = capsys.readouterr().out
        assert "calibrated in 30.0 s" in out

    def test_never_ready_times_out(self, workdir, capsys):
        script = MotionScript(
            segments=(ScriptSegment("l_carrying", 12, 12, 15_000),),
            calib_steps=((0, 2, 2, 2),))
        path = write_script(workdir / "cal.wise-script", script)
        main(["simulate", "--script", path, "--out", "frames.txt"])
        assert main(["calibrate", "--source", "frames.txt", "--timeout", "10"]) == 2
        assert "ERR TIMEOUT" in capsys.readouterr().out


class TestMount:
    def test_aligned_stream_confirms(self, workdir, capsys):
        script = MotionScript(
            segments=(ScriptSegment("l_carrying", 12, 12, 3000),),
            carrying_deg=12.0)
        path = write_script(workdir / "np.wise-script", script)
        main(["simulate", "--script", path, "--out", "frames.txt"])
        assert main(["mount", "--source", "frames.txt", "--side", "L"]) == 0
        assert "aligned" in capsys.readouterr().out

    def test_misaligned_stream_times_out(self, workdir, capsys):
        from wise.frames import SegmentId
        from wise.simulate import longitudinal_mount_offset
        script = MotionScript(
            segments=(ScriptSegment("l_carrying", 12, 12, 3000),),
            carrying_deg=12.0,
            mounting_offsets={SegmentId.LA: longitudinal_mount_offset(15.0)})
        path = write_script(workdir / "off.wise-script", script)
        main(["simulate", "--script", path, "--out", "frames.txt"])
        assert main(["mount", "--source", "frames.txt", "--side", "L"]) == 2
        out = capsys.readouterr().out
        assert "ROTATE_BACKWARD" in out


class TestPlay:
    def make_session(self, workdir):
        script = write_script(workdir / "abd.wise-script", abduction_script())
        main(["simulate", "--script", script, "--out", "frames.txt"])
        main(["record", "--source", "frames.txt", "--out", "s.wise-session"])

    def test_replay_rows_byte_identical(self, workdir, capsys):
        self.make_session(workdir)
        capsys.readouterr()
        assert main(["play", "s.wise-session"]) == 0
        out = capsys.readouterr().out.strip().split("\n")
        stored = [line for line in open("s.wise-session").read().strip().split("\n")
                  if not line.startswith("#")]
        assert out == stored

    def test_seek_beyond_duration_clamps(self, workdir, capsys):
        self.make_session(workdir)
        capsys.readouterr()
        assert main(["play", "s.wise-session", "--seek", "999999"]) == 0
        out = capsys.readouterr().out.strip().split("\n")
        assert len(out) == 1  # just the final row

    def test_missing_session_is_io_error(self, workdir, capsys):
        assert main(["play", "missing.wise-session"]) == 3
        assert "ERR IO" in capsys.readouterr().out


class TestScoreValidation:
    def test_unknown_channel_usage_error(self, workdir, capsys):
        open("s.wise-session", "w").write("#WISE-SESSION v1\n")
        assert main(["score", "s.wise-session", "--target", "90",
                     "--channel", "nope"]) == 1
        assert "ERR USAGE" in capsys.readouterr().out

    def test_zero_reps_reported(self, workdir, capsys):
        script = write_script(workdir / "flat.wise-script",
                              MotionScript(segments=(
                                  ScriptSegment("l_carrying", 12, 12, 1000),),
                                  carrying_deg=12.0))
        main(["simulate", "--script", script, "--out", "frames.txt"])
        main(["record", "--source", "frames.txt", "--out", "s.wise-session"])
        capsys.readouterr()
        assert main(["score", "s.wise-session", "--target", "90",
                     "--channel", "l_shoulder_elevation"]) == 0
        assert "reps: 0" in capsys.readouterr().out


class TestGameCli:
    def write_fork_trace(self, path):
        lines = []
        t = 0
        calib = 10.0  # default profile force

        def fk(grasp, rot=0.0):
            nonlocal t
            t += 20
            lines.append(render_game_frame(GameFrame("FK", t, (grasp, rot)), True))

        def pd(poke, cut=0.0):
            nonlocal t
            lines.append(render_game_frame(GameFrame("PD", t, (poke, cut)), True))

        for _ in range(3):  # three level-1 repetitions
            fk(calib * 0.6)
            fk(calib * 0.6, 95.0)
            pd(calib * 0.6)
            fk(0.0)  # tick consuming the poke
            pd(0.0)
            fk(0.0)  # DONE_ONE dwell
        with open(path, "w") as fp:
            fp.write("\n".join(lines) + "\n")

    def test_fork_events_and_progress(self, workdir, capsys):
        self.write_fork_trace("trace.txt")
        assert main(["game", "fork", "--source", "trace.txt",
                     "--progress", "log.wise-progress"]) == 0
        out = capsys.readouterr().out
        assert out.count("RING_OPEN") == 3
        assert out.count("COMPLETE") == 3
        assert "LEVEL_UP" in out
        log = open("log.wise-progress").read().strip().split("\n")
        # header + one record per completion + the end-of-stream checkpoint
        assert len(log) == 5
        assert log[-1].split(",")[2] == "2"  # advanced to level 2

    def test_grasp_headless(self, workdir, capsys):
        lines = []
        t = 0
        lift = 0.0
        for i in range(4000):
            t += 20
            lift = 10.0 if i % 2 == 0 else 0.0
            lines.append(render_game_frame(GameFrame("FK", t, (0.0, lift)), True))
        open("trace.txt", "w").write("\n".join(lines) + "\n")
        assert main(["game", "grasp", "--source", "trace.txt"]) == 0
        out = capsys.readouterr().out
        assert "WIN" in out


class TestRecordWithExercise:
    def test_instructor_pose_costream(self, workdir, capsys, monkeypatch):
        script = write_script(workdir / "abd.wise-script", abduction_script())
        main(["simulate", "--script", script, "--out", "frames.txt"])
        commands = "capture\ncapture\nsave\nquit\n"
        monkeypatch.setattr(sys, "stdin", io.StringIO(commands))
        main(["author", "--out", "ex.wise-exercise", "--source", "frames.txt"])
        capsys.readouterr()
        assert main(["record", "--source", "frames.txt", "--out", "s.wise-session",
                     "--exercise", "ex.wise-exercise"]) == 0
        out = capsys.readouterr().out
        pose_lines = [l for l in out.split("\n") if l.startswith("EVT POSE")]
        assert len(pose_lines) == 201
        assert all(",INSTRUCTOR," in l for l in pose_lines)
        with open("s.wise-session") as fp:
            session = load_session(fp)
        assert session.meta["exercise"] == "exercise"
        assert len(session.rows) == 201


class TestAuthorCli:
    def test_capture_and_save(self, workdir, capsys, monkeypatch):
        script = write_script(workdir / "abd.wise-script", abduction_script())
        main(["simulate", "--script", script, "--out", "frames.txt"])
        commands = "capture\ncapture\ninterval 0 1.5\nname raise\nsave\nquit\n"
        monkeypatch.setattr(sys, "stdin", io.StringIO(commands))
        assert main(["author", "--out", "ex.wise-exercise",
                     "--source", "frames.txt"]) == 0
        from wise.exercise import load_exercise
        with open("ex.wise-exercise") as fp:
            ex = load_exercise(fp)
        assert len(ex.keypoints) == 2
        assert ex.intervals_s == (1.5,)
        assert ex.name == "raise"


class TestLiveSource:
    def test_calibrate_over_socket(self, workdir, capsys):
        import socket
        import threading
        script = MotionScript(segments=(ScriptSegment("l_carrying", 12, 12, 2000),),
                              calib_steps=((0, 0, 0, 0), (1000, 3, 3, 3)))
        path = write_script(workdir / "cal.wise-script", script)
        main(["simulate", "--script", path, "--out", "frames.txt"])
        payload = open("frames.txt", "rb").read()
        server = socket.socket()
        server.bind(("127.0.0.1", 0))
        server.listen(1)
        port = server.getsockname()[1]

        def serve_once():
            conn, _ = server.accept()
            conn.sendall(payload)
            conn.close()

        thread = threading.Thread(target=serve_once, daemon=True)
        thread.start()
        assert main(["calibrate", "--source", f"127.0.0.1:{port}"]) == 0
        thread.join(timeout=5)
        server.close()
        assert "calibrated in 1.0 s" in capsys.readouterr().out


class TestUsage:
    def test_no_command_is_usage_error(self):
        assert main([]) == 1

    def test_unknown_command(self):
        assert main(["frobnicate"]) == 1

    def test_console_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "wise.cli", "--help"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert "calibrate" in proc.stdout


class TestDataErrors:
    def test_bad_script_is_data_error(self, workdir, capsys):
        open("bad.wise-script", "w").write("garbage\n")
        assert main(["simulate", "--script", "bad.wise-script", "--out", "f.txt"]) == 4
        assert "ERR DATA" in capsys.readouterr().out

    def test_bad_session_is_data_error(self, workdir, capsys):
        open("bad.wise-session", "w").write("not a session\n")
        assert main(["play", "bad.wise-session"]) == 4
