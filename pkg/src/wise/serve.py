"""Bridge hosting: glue between the workflows and connected UI clients.

Runs the event loop that multiplexes playback, live streaming, and
authoring over one listening socket. Playback is paced by the wall clock
against the recorded timestamps; live frames are pumped from a reader
thread through the bounded queue.
"""

from __future__ import annotations

import asyncio
import os
import time
from typing import Optional

from .bridge import (BridgeServer, angles_payload, calib_payload,
                     mount_payload, playback_payload, pose_payload)
from .calib import CalibMonitor
from .frames import SEGMENTS
from .exercise import (Exercise, add_keypoint, load_exercise, save_exercise,
                       set_interval, trajectory)
from .jcs import joint_angles
from .mounting import MountAdvisor
from .profile import load_profile_path
from .quat import DomainError
from .retarget import RetargetSet, correct, retarget, to_left_handed
from .session import PlaybackCursor, load_session
from .streams import DropOldestQueue, FrameAssembler, open_source, pump
from .wire import WireFrame

TICK_S = 0.02


def _split_listen(spec: str):
    host, _, port = spec.rpartition(":")
    return host or "127.0.0.1", int(port)


class ServeApp:
    def __init__(self, args):
        self.args = args
        self.profile = load_profile_path(getattr(args, "profile", None))
        self.server = BridgeServer(*_split_listen(args.listen), self._on_command)
        self.cursor: Optional[PlaybackCursor] = None
        self.exercise: Optional[Exercise] = None
        self.authoring = Exercise(name="authored")
        self.latest_pose: Optional[RetargetSet] = None
        self.monitor = CalibMonitor()
        self.advisor = MountAdvisor()
        self._queue: Optional[DropOldestQueue] = None
        self._tasks = []
        self._stop = asyncio.Event()

        if args.session:
            with open(args.session) as fp:
                self.cursor = PlaybackCursor(load_session(fp))
        if args.exercise:
            with open(args.exercise) as fp:
                self.exercise = load_exercise(fp)

    async def start(self) -> None:
        await self.server.start()
        self._tasks.append(asyncio.create_task(self._ticker()))
        if self.args.source:
            self._queue = DropOldestQueue()
            pump(open_source(self.args.source), self._queue)
            self._tasks.append(asyncio.create_task(self._live_loop()))

    async def run_forever(self) -> None:
        await self._stop.wait()

    async def close(self) -> None:
        self._stop.set()
        for task in self._tasks:
            task.cancel()
        await self.server.close()

    # -- playback and instructor ticker --------------------------------

    async def _ticker(self) -> None:
        last = time.monotonic()
        exercise_t0 = last
        last_playback = ""
        while True:
            await asyncio.sleep(TICK_S)
            now = time.monotonic()
            dt_ms = (now - last) * 1000.0
            last = now
            if self.cursor is not None:
                rows = self.cursor.step(dt_ms)
                if rows:
                    row = rows[-1]
                    self.server.publish("ANGLES", f"{row.t_ms}," +
                                        ",".join(f"{a:.4f}" for a in row.angles) +
                                        f",{row.flags}")
                    rt = to_left_handed(RetargetSet(
                        {seg: row.quat(seg) for seg in SEGMENTS}))
                    self.server.publish("POSE", pose_payload(row.t_ms, rt, "PATIENT"))
                payload = playback_payload(self.cursor.position_ms,
                                           self.cursor.session.duration_ms,
                                           self.cursor.state, self.cursor.rate)
                if payload != last_playback:
                    self.server.publish("PLAYBACK", payload)
                    last_playback = payload
            if self.exercise is not None and self.exercise.playable():
                t = (now - exercise_t0) % self.exercise.duration_s
                pose = to_left_handed(trajectory(self.exercise, t))
                self.server.publish("POSE", pose_payload(int(t * 1000), pose, "INSTRUCTOR"))

    # -- live source ----------------------------------------------------

    async def _live_loop(self) -> None:
        loop = asyncio.get_running_loop()
        assembler = FrameAssembler(self.args.window_ms)
        while True:
            frame = await loop.run_in_executor(None, self._queue.get, 0.25)
            if frame is None:
                if self._queue._closed:  # source drained
                    return
                continue
            if not isinstance(frame, WireFrame):
                continue
            fs = assembler.push(frame)
            if fs is None:
                continue
            corrected = correct(fs, self.profile.offsets)
            rt = to_left_handed(retarget(corrected))
            self.latest_pose = rt
            angles = joint_angles(corrected)
            self.server.publish("POSE", pose_payload(fs.t_ms, rt, "PATIENT"))
            self.server.publish("ANGLES", angles_payload(fs.t_ms, angles))
            self.server.publish("CALIB", calib_payload(fs.t_ms, self.monitor.update(fs)))
            self.server.publish("MOUNT", mount_payload(self.advisor.advise(corrected)))

    # -- control commands ------------------------------------------------

    def _on_command(self, verb: str, args: str) -> Optional[str]:
        try:
            if verb == "PLAY":
                if not self.cursor:
                    return "PLAYBACK no session loaded"
                self.cursor.play()
            elif verb == "PAUSE":
                if not self.cursor:
                    return "PLAYBACK no session loaded"
                self.cursor.pause()
            elif verb == "SEEK":
                if not self.cursor:
                    return "PLAYBACK no session loaded"
                self.cursor.seek(int(float(args)))
            elif verb == "VIEW":
                pass  # camera choice is client-local; accepted for logging
            elif verb == "SELECT_EXERCISE":
                path = args if os.path.exists(args) else f"{args}.wise-exercise"
                with open(path) as fp:
                    self.exercise = load_exercise(fp)
            elif verb == "CAPTURE_KEYPOINT":
                if self.latest_pose is None:
                    return "AUTHOR no live pose to capture"
                self.authoring = add_keypoint(self.authoring, self.latest_pose)
            elif verb == "SET_INTERVAL":
                idx, seconds = args.split()
                self.authoring = set_interval(self.authoring, int(idx), float(seconds))
            elif verb == "SAVE_EXERCISE":
                out = self.args.out_exercise or f"{self.authoring.name}.wise-exercise"
                if not self.authoring.playable():
                    return "AUTHOR need at least two keypoints"
                with open(out, "w") as fp:
                    save_exercise(self.authoring, fp)
        except (DomainError, ValueError, OSError) as err:
            return f"CMD {err}"
        return None


def run_serve(args) -> int:
    async def runner() -> None:
        app = ServeApp(args)
        await app.start()
        print(f"bridge listening on {args.listen} "
              f"(port {app.server.bound_port})", flush=True)
        try:
            await app.run_forever()
        finally:
            await app.close()

    try:
        asyncio.run(runner())
    except KeyboardInterrupt:
        pass
    return 0
