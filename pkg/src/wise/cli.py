"""Operator command line for every workflow.

Subcommands: calibrate, mount, record, play, author, score, simulate,
game, serve. Sources are a file path, `-` for stdin, a serial-style
device path, or `host:port`. All subcommands are deterministic for file
sources: replay is paced by frame timestamps, not the wall clock.

Exit codes: 0 success, 1 usage, 2 timeout/not-reached, 3 I/O failure,
4 data-format error. Failures print one machine-parsable line:
`ERR <CODE> <detail>`.
"""

from __future__ import annotations

import argparse
import sys
from typing import Dict, Iterator, Optional, TextIO

from . import bridge as bridgemod
from .calib import CalibMonitor, render_bars
from .exercise import (AdherenceReport, Exercise, add_keypoint, load_exercise,
                       save_exercise, score as score_series, set_interval,
                       trajectory, undo_keypoint)
from .frames import SegmentId, SensorFrameSet
from .games.fork import ForkConfig, ForkInput, ForkState, fork_step
from .games.grasp import GraspConfig, GraspState, grasp_step
from .games.progress import progress_report
from .jcs import ANGLE_CHANNELS, joint_angles
from .mounting import MountAdvisor
from .profile import Profile, load_profile_path
from .quat import DomainError
from .retarget import correct, retarget, to_left_handed
from .session import (PlaybackCursor, SessionError, SessionWriter,
                      load_session, row_from_pipeline)
from .simulate import load_script, synthesize
from .streams import FrameAssembler, IncompleteSetError, iter_wire, open_source
from .wire import GameFrame, ParseError, WireFrame, frame_for, render_frame


class CliError(Exception):
    def __init__(self, exit_code: int, code: str, detail: str):
        self.exit_code = exit_code
        self.code = code
        self.detail = detail
        super().__init__(detail)


def _err(exit_code: int, code: str, detail: str) -> CliError:
    return CliError(exit_code, code, detail)


def _is_live(source: str) -> bool:
    host, sep, port = source.rpartition(":")
    return bool(sep) and port.isdigit() and "/" not in source


def _frame_sets(source: str, window_ms: int = 100,
                stats: Optional[Dict[str, int]] = None) -> Iterator[SensorFrameSet]:
    assembler = FrameAssembler(window_ms)

    def on_error(err, raw):
        if stats is not None:
            stats["errors"] = stats.get("errors", 0) + 1

    if _is_live(source):
        # live ingestion runs on its own thread behind the bounded queue,
        # so a slow workflow sheds old frames instead of stalling the link
        from .streams import DropOldestQueue, pump
        queue = DropOldestQueue()
        pump(open_source(source), queue, on_error)
        frames = iter(queue)
    else:
        frames = iter_wire(open_source(source), on_error)

    for frame in frames:
        if not isinstance(frame, WireFrame):
            continue
        fs = assembler.push(frame)
        if fs is not None:
            yield fs


def _open_out(path: str) -> TextIO:
    if path == "-":
        return sys.stdout
    host, sep, port = path.rpartition(":")
    if sep and port.isdigit() and "/" not in path:
        import socket
        sock = socket.create_connection((host, int(port)))
        return sock.makefile("w", encoding="ascii", newline="\n")
    return open(path, "w", encoding="ascii")


def _close_out(fp: TextIO) -> None:
    if fp is not sys.stdout:
        fp.close()


# -- subcommands -------------------------------------------------------------


def cmd_calibrate(args) -> int:
    monitor = CalibMonitor()
    shown = None
    for fs in _frame_sets(args.source, args.window_ms):
        report = monitor.update(fs)
        text = render_bars(report)
        if text != shown:
            print(text)
            print()
            shown = text
        if monitor.ready:
            print(f"calibrated in {monitor.elapsed_s():.1f} s")
            return 0
        if args.timeout is not None and monitor.elapsed_s() > args.timeout:
            raise _err(2, "TIMEOUT", f"not calibrated after {args.timeout} s")
    raise _err(2, "TIMEOUT", "stream ended before calibration completed")


def cmd_mount(args) -> int:
    profile = load_profile_path(args.profile)
    advisor = MountAdvisor(hold_ms=args.hold_ms)
    side = args.side.lower()
    for fs in _frame_sets(args.source, args.window_ms):
        state = advisor.advise(correct(fs, profile.offsets))
        st = state.side(side)
        print(f"t={state.t_ms} {args.side} ie={st.ie_rotation:+.2f} "
              f"carry={st.carrying:.2f} cue={st.cue}")
        if advisor.confirm(side):
            print(f"{args.side} sensor aligned")
            return 0
        if args.timeout is not None and state.t_ms > args.timeout * 1000:
            raise _err(2, "TIMEOUT", f"not aligned after {args.timeout} s")
    raise _err(2, "TIMEOUT", "stream ended before alignment confirmed")


def cmd_record(args) -> int:
    profile = load_profile_path(args.profile)
    exercise = None
    if args.exercise:
        with open(args.exercise) as fp:
            exercise = load_exercise(fp)
    meta = {"subject": args.subject or profile.alias}
    if exercise:
        meta["exercise"] = exercise.name
    rows = 0
    out = _open_out(args.out)
    try:
        writer = SessionWriter(out, meta)
        t0: Optional[int] = None
        for fs in _frame_sets(args.source, args.window_ms):
            corrected = correct(fs, profile.offsets)
            rt = retarget(corrected)
            angles = joint_angles(corrected)
            if t0 is None:
                t0 = fs.t_ms
            try:
                writer.write_row(row_from_pipeline(fs.t_ms, rt, angles))
            except SessionError:
                continue  # duplicate timestamp from overlapping sources
            rows += 1
            if exercise is not None:
                pose = to_left_handed(trajectory(exercise, (fs.t_ms - t0) / 1000.0))
                print("EVT POSE " + bridgemod.pose_payload(fs.t_ms, pose, "INSTRUCTOR"))
    finally:
        _close_out(out)
    print(f"recorded {rows} rows to {args.out}", file=sys.stderr)
    return 0


def cmd_play(args) -> int:
    try:
        with open(args.session) as fp:
            session = load_session(fp)
    except FileNotFoundError:
        raise _err(3, "IO", f"no such session {args.session}")
    for warning in session.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if args.rate <= 0:
        raise _err(1, "USAGE", "rate must be positive")
    cursor = PlaybackCursor(session, rate=args.rate)
    if args.seek is not None and session.rows:
        row = cursor.seek(args.seek)
        print(row.render())
    cursor.play()
    while cursor.state == "PLAYING":
        for row in cursor.step(1000.0):
            print(row.render())
    return 0


def cmd_score(args) -> int:
    if args.channel not in ANGLE_CHANNELS:
        raise _err(1, "USAGE",
                   f"unknown channel {args.channel}; one of {', '.join(ANGLE_CHANNELS)}")
    try:
        with open(args.session) as fp:
            session = load_session(fp)
    except FileNotFoundError:
        raise _err(3, "IO", f"no such session {args.session}")
    report = score_series(session.channel_series(args.channel), args.target,
                          open_fraction=args.open_frac)
    _print_report(report)
    return 0


def _print_report(report: AdherenceReport) -> None:
    print(f"reps: {report.rep_count}")
    if report.rep_peaks:
        print("peaks_deg: " + ",".join(f"{p:.4f}" for p in report.rep_peaks))
        print(f"mean_deg: {report.mean:.4f}")
        print(f"std_deg: {report.std:.4f}" if report.std is not None else "std_deg: nan")
    print(report.summary())


def cmd_simulate(args) -> int:
    with open(args.script) as fp:
        script = load_script(fp)
    out = _open_out(args.out)
    try:
        for t in script.tick_times():
            fs, _ = synthesize(script, t)
            for seg in SegmentId:
                wf = frame_for(seg, fs.t_ms, fs.q(seg), fs.calib[seg])
                out.write(render_frame(wf, with_crc=not args.no_crc) + "\n")
    finally:
        _close_out(out)
    return 0


def cmd_author(args) -> int:
    frames = _frame_sets(args.source, args.window_ms) if args.source else None
    profile = load_profile_path(args.profile)
    ex = Exercise(name=args.name)
    print("commands: capture | undo | interval <i> <s> | name <text> | save | quit",
          file=sys.stderr)
    for raw in sys.stdin:
        cmd, _, rest = raw.strip().partition(" ")
        if not cmd:
            continue
        try:
            if cmd == "capture":
                if frames is None:
                    print("no pose source attached")
                    continue
                fs = next(frames, None)
                if fs is None:
                    print("pose source exhausted")
                    continue
                ex = add_keypoint(ex, retarget(correct(fs, profile.offsets)))
                print(f"captured keypoint {len(ex.keypoints)}")
            elif cmd == "undo":
                ex = undo_keypoint(ex)
                print(f"keypoints: {len(ex.keypoints)}")
            elif cmd == "interval":
                idx, seconds = rest.split()
                ex = set_interval(ex, int(idx), float(seconds))
                print(f"interval {idx} = {seconds} s")
            elif cmd == "name":
                ex = Exercise(rest or ex.name, ex.keypoints, ex.intervals_s, ex.tick_rate_hz)
                print(f"name = {ex.name}")
            elif cmd == "save":
                if not ex.playable():
                    print("need at least two keypoints before saving")
                    continue
                with open(args.out, "w") as fp:
                    save_exercise(ex, fp)
                print(f"saved {len(ex.keypoints)} keypoints to {args.out}")
            elif cmd in ("quit", "exit"):
                break
            else:
                print(f"unknown command {cmd}")
        except (DomainError, ValueError) as err:
            print(f"error: {err}")
    return 0


def cmd_game(args) -> int:
    profile = load_profile_path(args.profile)
    if args.which == "fork":
        return _run_fork(args, profile)
    return _run_grasp(args, profile)


def _run_fork(args, profile: Profile) -> int:
    calib_force = profile.force_for(args.hand)
    state = ForkState(calib_force_n=calib_force, level=args.level)
    config = ForkConfig(
        poke_fraction=profile.config.get("poke_fraction", 0.5),
        cut_fraction=profile.config.get("cut_fraction", 0.5),
    )
    latest = {"KN": 0.0, "PD": (0.0, 0.0)}
    prev_t: Optional[int] = None
    for frame in iter_wire(open_source(args.source)):
        if not isinstance(frame, GameFrame):
            continue
        if frame.tag == "KN":
            latest["KN"] = frame.values[0]
            continue
        if frame.tag == "PD":
            latest["PD"] = frame.values
            continue
        dt = 0.0 if prev_t is None else max(frame.t_ms - prev_t, 0)
        prev_t = frame.t_ms
        inp = ForkInput(
            grasp_n=frame.values[0], rotation_deg=frame.values[1],
            poke_n=latest["PD"][0], cut_n=latest["PD"][1],
            knife_grasp_n=latest["KN"],
        )
        state, events = fork_step(state, inp, dt, config)
        for event in events:
            print(f"{frame.t_ms} L{state.level} {event}")
        if "COMPLETE" in events and args.progress:
            progress_report(state, args.progress, frame.t_ms)
        if state.done:
            print(f"activity complete in {state.timer_ms / 1000.0:.1f} s, "
                  f"score {state.score}")
            return 0
    if args.progress and prev_t is not None:
        progress_report(state, args.progress, prev_t)
    return 0


def _run_grasp(args, profile: Profile) -> int:
    limit = profile.config.get("grasp_limit_n", profile.force_for(args.hand))
    state = GraspState(grasp_limit_n=limit, level=args.level)
    config = GraspConfig()
    prev_t: Optional[int] = None
    for frame in iter_wire(open_source(args.source)):
        if not isinstance(frame, GameFrame) or frame.tag != "FK":
            continue
        # grasp device reuses the FK tag: values are grasp and lift force
        dt = 0.0 if prev_t is None else max(frame.t_ms - prev_t, 0)
        prev_t = frame.t_ms
        state, events = grasp_step(state, frame.values[0], frame.values[1], dt, config)
        for event in events:
            print(f"{frame.t_ms} L{state.level} {event}")
        if state.outcome != "RUNNING":
            print(f"outcome {state.outcome}, stars {state.stars}")
            if args.progress:
                progress_report(state, args.progress, frame.t_ms)
            return 0
    if args.progress and prev_t is not None:
        progress_report(state, args.progress, prev_t)
    return 0


def cmd_serve(args) -> int:
    from .serve import run_serve
    return run_serve(args)


# -- argument parsing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wise", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_source(p, required=True):
        p.add_argument("--source", required=required,
                       help="frame source: file path, '-', device path, or host:port")
        p.add_argument("--window-ms", type=int, default=100,
                       help="freshness window for assembling module frames")

    p = sub.add_parser("calibrate", help="run the calibration monitor until ready")
    add_source(p)
    p.add_argument("--timeout", type=float, default=None, help="give up after this many seconds")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("mount", help="stream mounting cues until aligned")
    add_source(p)
    p.add_argument("--side", choices=["L", "R"], required=True)
    p.add_argument("--hold-ms", type=int, default=1000)
    p.add_argument("--timeout", type=float, default=None)
    p.add_argument("--profile", default=None)
    p.set_defaults(func=cmd_mount)

    p = sub.add_parser("record", help="record a session file from a source")
    add_source(p)
    p.add_argument("--out", required=True)
    p.add_argument("--exercise", default=None, help="co-stream this exercise's instructor poses")
    p.add_argument("--profile", default=None)
    p.add_argument("--subject", default=None)
    p.set_defaults(func=cmd_record)

    p = sub.add_parser("play", help="replay a recorded session to stdout")
    p.add_argument("session")
    p.add_argument("--rate", type=float, default=1.0)
    p.add_argument("--seek", type=int, default=None, help="start position in ms")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("author", help="interactive exercise authoring")
    p.add_argument("--out", required=True)
    p.add_argument("--source", default=None)
    p.add_argument("--window-ms", type=int, default=100)
    p.add_argument("--name", default="exercise")
    p.add_argument("--profile", default=None)
    p.set_defaults(func=cmd_author)

    p = sub.add_parser("score", help="adherence report for a session channel")
    p.add_argument("session")
    p.add_argument("--target", type=float, required=True)
    p.add_argument("--channel", required=True)
    p.add_argument("--open-frac", type=float, default=0.2)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("simulate", help="emit wire frames from a motion script")
    p.add_argument("--script", required=True)
    p.add_argument("--out", required=True, help="file path, '-', or host:port")
    p.add_argument("--no-crc", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("game", help="run a game state machine headless")
    p.add_argument("which", choices=["fork", "grasp"])
    p.add_argument("--source", required=True)
    p.add_argument("--profile", default=None)
    p.add_argument("--progress", default=None, help="progress log path")
    p.add_argument("--hand", choices=["left", "right"], default="left",
                   help="unaffected hand whose calibration force sets thresholds")
    p.add_argument("--level", type=int, choices=[1, 2, 3], default=1)
    p.set_defaults(func=cmd_game)

    p = sub.add_parser("serve", help="run the UI bridge")
    p.add_argument("--listen", required=True, help="host:port to listen on")
    p.add_argument("--session", default=None, help="session file for playback")
    p.add_argument("--source", default=None, help="live frame source")
    p.add_argument("--window-ms", type=int, default=100)
    p.add_argument("--profile", default=None)
    p.add_argument("--exercise", default=None, help="exercise to stream as instructor")
    p.add_argument("--out-exercise", default=None, help="path for SAVE_EXERCISE")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except CliError as err:
        print(f"ERR {err.code} {err.detail}")
        return err.exit_code
    except (ParseError, DomainError, SessionError, IncompleteSetError) as err:
        print(f"ERR DATA {err}")
        return 4
    except BrokenPipeError:
        return 0
    except OSError as err:
        print(f"ERR IO {err}")
        return 3
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
