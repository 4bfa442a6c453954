"""Independent reference implementations the tests check against.

Everything here is deliberately written on different machinery than the
package: rotation matrices via numpy, Euler handling via scipy, a bitwise
CRC-32, a table-driven calibration rule, and a dict-based fork automaton
transcribed directly from the game rules.
"""

from __future__ import annotations

import math
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.spatial.transform import Rotation


# -- rotation matrix oracle ---------------------------------------------------


def quat_to_matrix(w: float, x: float, y: float, z: float) -> np.ndarray:
    """Standard unit-quaternion to rotation-matrix conversion."""
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def axis_angle_matrix(axis: Sequence[float], angle_deg: float) -> np.ndarray:
    """Rodrigues rotation matrix."""
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    th = math.radians(angle_deg)
    k = np.array([[0, -a[2], a[1]], [a[2], 0, -a[0]], [-a[1], a[0], 0]])
    return np.eye(3) + math.sin(th) * k + (1 - math.cos(th)) * (k @ k)


def rotate_via_matrix(q_wxyz: Sequence[float], v: Sequence[float]) -> np.ndarray:
    return quat_to_matrix(*q_wxyz) @ np.asarray(v, dtype=float)


def scipy_from_quat(q_wxyz: Sequence[float]) -> Rotation:
    w, x, y, z = q_wxyz
    return Rotation.from_quat([x, y, z, w])


def scipy_euler(q_wxyz: Sequence[float], seq: str) -> np.ndarray:
    return scipy_from_quat(q_wxyz).as_euler(seq, degrees=True)


# -- CRC-32 (IEEE reflected) --------------------------------------------------


def crc32_bitwise(data: bytes) -> int:
    crc = 0xFFFFFFFF
    for byte in data:
        crc ^= byte
        for _ in range(8):
            if crc & 1:
                crc = (crc >> 1) ^ 0xEDB88320
            else:
                crc >>= 1
    return crc ^ 0xFFFFFFFF


# -- calibration next-step rule table -----------------------------------------


def calib_next_step_oracle(levels: Sequence[Tuple[int, int, int]]) -> str:
    """levels: 5 x (gyro, accel, mag)."""
    gyros = [g for g, _, _ in levels]
    accels = [a for _, a, _ in levels]
    mags = [m for _, _, m in levels]
    if min(gyros) < 3:
        return "HOLD_STILL"
    if min(accels) < 3:
        return "TILT_45"
    if min(mags) < 3:
        return "RANDOM_MOTION"
    return "DONE"


# -- fork game reference automaton --------------------------------------------

# A direct transcription of the rules: phase list, per-level grasp fraction
# (0.50 / 0.75 / 1.00 of the calibrated force), rotation minimum (90 then
# 135), level advance after 3 and 6 repetitions, activity done after 9 at
# level 3. Knife grasp needs the full calibrated force; poke and cut need
# the configured fractions.


def fork_reference_new(calib: float) -> Dict:
    return {"level": 1, "phase": "AWAIT_GRASP", "count": 0, "done": False}


def fork_reference_step(st: Dict, calib: float, inp: Dict,
                        poke_frac: float = 0.5, cut_frac: float = 0.5) -> List[str]:
    values = [inp.get(k, 0.0) for k in ("grasp", "rot", "poke", "knife", "cut")]
    if any(not math.isfinite(v) for v in values):
        return []
    if any(inp.get(k, 0.0) < 0 for k in ("grasp", "poke", "knife", "cut")):
        return []
    if st["done"]:
        return []
    events: List[str] = []
    frac = {1: 0.50, 2: 0.75, 3: 1.00}[st["level"]]
    rot_min = {1: 90.0, 2: 135.0, 3: 135.0}[st["level"]]
    grasped = inp.get("grasp", 0.0) >= frac * calib

    def finish_rep():
        st["count"] += 1
        events.append("COMPLETE")
        if st["level"] == 1 and st["count"] >= 3:
            events.append("LEVEL_UP")
            st["level"], st["count"] = 2, 0
        elif st["level"] == 2 and st["count"] >= 6:
            events.append("LEVEL_UP")
            st["level"], st["count"] = 3, 0
        elif st["level"] == 3 and st["count"] >= 9:
            events.append("ACTIVITY_DONE")
            st["done"] = True
        st["phase"] = "DONE_ONE"

    phase = st["phase"]
    if phase == "DONE_ONE":
        st["phase"] = "AWAIT_GRASP"
    elif phase == "AWAIT_GRASP" and grasped:
        events.append("RING_OPEN")
        st["phase"] = "AWAIT_LIFT_ROTATE"
    elif phase == "AWAIT_LIFT_ROTATE" and grasped and \
            inp.get("pointing", True) and inp.get("rot", 0.0) >= rot_min:
        events.append("RING_ROTATE")
        st["phase"] = "AWAIT_POKE"
    elif phase == "AWAIT_POKE" and inp.get("poke", 0.0) >= poke_frac * calib:
        events.append("APPLE_DROP")
        if st["level"] < 3:
            finish_rep()
        else:
            st["phase"] = "AWAIT_KNIFE_GRASP"
    elif phase == "AWAIT_KNIFE_GRASP" and inp.get("knife", 0.0) >= calib:
        events.append("KNIFE_GRASP")
        st["phase"] = "AWAIT_CUT"
    elif phase == "AWAIT_CUT" and inp.get("cut", 0.0) >= cut_frac * calib:
        events.append("CUT_DONE")
        finish_rep()
    return events


# -- statistics ---------------------------------------------------------------


def two_pass_mean_std(values: Sequence[float]) -> Tuple[float, float]:
    n = len(values)
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)
