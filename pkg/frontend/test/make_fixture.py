#!/usr/bin/env python3
"""Regenerate fixtures/bridge.log from the backend's own payload builders.

Run from this directory with the `wise` package installed:

    python3 make_fixture.py

Keeping the log generated by the backend pins the event-payload contract
the UI tests replay against.
"""

import os

from wise.bridge import (angles_payload, calib_payload, game_payload,
                         mount_payload, playback_payload, pose_payload)
from wise.calib import CalibMonitor
from wise.frames import CalibStatus, SEGMENTS, SensorFrameSet
from wise.jcs import joint_angles
from wise.mounting import MountAdvisor
from wise.retarget import retarget, to_left_handed
from wise.simulate import MotionScript, ScriptSegment, synthesize

OUT = os.path.join(os.path.dirname(__file__), "fixtures", "bridge.log")


def main() -> None:
    script = MotionScript(segments=(
        ScriptSegment("l_shoulder_elevation", 0, 90, 2000),
        ScriptSegment("l_shoulder_elevation", 90, 0, 2000),
    ), carrying_deg=12.0)
    monitor = CalibMonitor()
    advisor = MountAdvisor()
    lines = []
    ramp = [(0, CalibStatus(0, 0, 0)), (400, CalibStatus(3, 1, 0)),
            (800, CalibStatus(3, 3, 2)), (1200, CalibStatus(3, 3, 3))]
    for t in range(0, 4001, 200):
        fs, _ = synthesize(script, t)
        levels = max((st for at, st in ramp if t >= at), key=lambda s: (s.gyro, s.accel, s.mag))
        fs = SensorFrameSet(fs.t_ms, fs.quats, {seg: levels for seg in SEGMENTS})
        rt = to_left_handed(retarget(fs))
        lines.append("EVT CALIB " + calib_payload(t, monitor.update(fs)))
        lines.append("EVT MOUNT " + mount_payload(advisor.advise(fs)))
        lines.append("EVT POSE " + pose_payload(t, rt, "PATIENT"))
        lines.append("EVT ANGLES " + angles_payload(t, joint_angles(fs)))
        lines.append("EVT PLAYBACK " + playback_payload(float(t), 4000, "PLAYING", 1.0))
    lines.append("EVT GAME " + game_payload(4000, "fork", 1, "AWAIT_GRASP", 0, 0))
    os.makedirs(os.path.dirname(OUT), exist_ok=True)
    with open(OUT, "w") as fp:
        fp.write("\n".join(lines) + "\n")
    print(f"wrote {len(lines)} events to {OUT}")


if __name__ == "__main__":
    main()
