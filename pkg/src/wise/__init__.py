"""Wearable inertial sensor motion capture and exergames for telerehabilitation.

Five body-worn modules stream absolute orientation quaternions; this
package turns them into avatar-ready rotations and clinical joint angles,
and drives the calibration, mounting, recording, playback, authoring, and
game workflows around them.
"""

from .quat import DomainError, EulerTriple, UnitQuat, Vec3
from .frames import CalibStatus, SegmentId, SensorFrameSet

__all__ = [
    "CalibStatus",
    "DomainError",
    "EulerTriple",
    "SegmentId",
    "SensorFrameSet",
    "UnitQuat",
    "Vec3",
]

__version__ = "0.1.0"
