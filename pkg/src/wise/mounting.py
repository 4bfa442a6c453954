"""Real-time arm-sensor mounting guidance.

With the subject holding the neutral pose, the internal-external rotation
reading at each shoulder exposes how far the arm sensor is twisted around
the limb, and the carrying angle confirms elbow plausibility. The advisor
emits a directional cue per side until the rotation reading sits within
the alignment band and the carrying angle is physiological, then requires
the alignment to hold for a debounce period before confirming.

The neutral pose puts the shoulder at the Y-Z-Y' degeneracy where only
the combined rotation is observable; that combined reading is exactly the
internal-external rotation, so shoulder-flagged frames remain usable here.
Elbow-flagged frames are the genuinely degenerate ones and hold the
previous cue instead of flickering.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional

from .frames import SensorFrameSet
from .jcs import JcsConfig, DEFAULT_CONFIG, carrying_in_range, joint_angles

IE_BAND_DEG = 5.0  # alignment band for internal-external rotation
DEFAULT_HOLD_MS = 1000

CUE_ALIGNED = "ALIGNED"
CUE_ROTATE_FORWARD = "ROTATE_FORWARD"
CUE_ROTATE_BACKWARD = "ROTATE_BACKWARD"


@dataclass(frozen=True)
class SideMountState:
    ie_rotation: float
    carrying: float
    cue: str
    aligned_since_ms: Optional[int] = None


@dataclass(frozen=True)
class MountState:
    t_ms: int
    left: SideMountState
    right: SideMountState

    def side(self, key: str) -> SideMountState:
        return self.left if key == "l" else self.right


def cue_for(ie_rotation: float, carrying: float) -> str:
    """Pure cue rule: aligned inside both closed bands, else a rotate cue."""
    if abs(ie_rotation) <= IE_BAND_DEG and carrying_in_range(carrying):
        return CUE_ALIGNED
    # internal (+) reads as over-rotated forward, so back it off
    return CUE_ROTATE_BACKWARD if ie_rotation > 0 else CUE_ROTATE_FORWARD


class MountAdvisor:
    """Stateful cue generator fed one frame set at a time."""

    def __init__(self, config: JcsConfig = DEFAULT_CONFIG, hold_ms: int = DEFAULT_HOLD_MS):
        self.config = config
        self.hold_ms = hold_ms
        self._prev: Dict[str, SideMountState] = {}
        self.state: Optional[MountState] = None

    def advise(self, frames: SensorFrameSet) -> MountState:
        angles = joint_angles(frames, self.config)
        sides: Dict[str, SideMountState] = {}
        for key in ("l", "r"):
            sa = angles.left if key == "l" else angles.right
            prev = self._prev.get(key)
            if sa.elbow_singular and prev is not None:
                # degenerate elbow data: keep the last cue, drop alignment hold
                sides[key] = SideMountState(prev.ie_rotation, prev.carrying, prev.cue, None)
                continue
            cue = cue_for(sa.shoulder_rotation, sa.carrying)
            since = None
            if cue == CUE_ALIGNED:
                since = prev.aligned_since_ms if prev and prev.aligned_since_ms is not None \
                    else frames.t_ms
            sides[key] = SideMountState(sa.shoulder_rotation, sa.carrying, cue, since)
        self._prev = sides
        self.state = MountState(frames.t_ms, sides["l"], sides["r"])
        return self.state

    def confirm(self, side: str = "l", now_ms: Optional[int] = None) -> bool:
        """True once the side has been continuously aligned for the hold time."""
        if self.state is None:
            return False
        st = self.state.side(side)
        if st.cue != CUE_ALIGNED or st.aligned_since_ms is None:
            return False
        now = self.state.t_ms if now_ms is None else now_ms
        return now - st.aligned_since_ms >= self.hold_ms
