"""Unit quaternion algebra and Euler angle extraction.

Quaternions are stored as (w, x, y, z): scalar part first, then the vector
part. That component order is used everywhere, including wire and file
formats. Angles cross every public boundary in degrees.

Composition uses the Hamilton product, so rotations compose left to right:
``mul(p, q)`` rotates by ``q`` first in the frame already rotated by ``p``
(intrinsic composition), and ``rotate_vec(mul(p, q), v)`` equals
``rotate_vec(p, rotate_vec(q, v))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

_NORM_DRIFT = 1e-12  # renormalize beyond this
_ZERO_NORM = 1e-6    # below this the quaternion carries no direction


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


@dataclass(frozen=True, slots=True)
class Vec3:
    """Plain 3-vector; used for rotation axes and rotated frame axes."""

    x: float
    y: float
    z: float

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def scaled(self, k: float) -> "Vec3":
        return Vec3(self.x * k, self.y * k, self.z * k)

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n < _ZERO_NORM:
            raise DomainError("cannot normalize near-zero vector")
        return self.scaled(1.0 / n)

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.x, self.y, self.z)


X_AXIS = Vec3(1.0, 0.0, 0.0)
Y_AXIS = Vec3(0.0, 1.0, 0.0)
Z_AXIS = Vec3(0.0, 0.0, 1.0)


@dataclass(frozen=True, slots=True)
class UnitQuat:
    """Unit quaternion (w, x, y, z).

    The constructor renormalizes whenever the norm drifts more than 1e-12
    from one, so every value in circulation satisfies |q| = 1 within 1e-9.
    A near-zero input has no direction and is rejected.
    """

    w: float
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        n = math.sqrt(self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z)
        if n < _ZERO_NORM:
            raise DomainError("zero-norm quaternion has no orientation")
        if abs(n - 1.0) > _NORM_DRIFT:
            inv = 1.0 / n
            object.__setattr__(self, "w", self.w * inv)
            object.__setattr__(self, "x", self.x * inv)
            object.__setattr__(self, "y", self.y * inv)
            object.__setattr__(self, "z", self.z * inv)

    def vector(self) -> Vec3:
        return Vec3(self.x, self.y, self.z)

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.w, self.x, self.y, self.z)


IDENTITY = UnitQuat(1.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True, slots=True)
class EulerTriple:
    """Three chained rotation angles in degrees plus the convention used.

    ``singular`` marks a gimbal-degenerate extraction: r1 then carries the
    whole representable rotation and r3 is forced to zero. Consumers must
    propagate the flag instead of trusting the r1/r3 split.
    """

    r1: float
    r2: float
    r3: float
    convention: str  # "YZY" or "ZXY"
    singular: bool = False


def from_axis_angle(axis: Vec3, angle_deg: float) -> UnitQuat:
    """Quaternion rotating by ``angle_deg`` about a unit ``axis``."""
    if abs(axis.norm() - 1.0) > 1e-9:
        raise DomainError(f"rotation axis must be unit length, |axis|={axis.norm():.12f}")
    half = math.radians(angle_deg) * 0.5
    s = math.sin(half)
    return UnitQuat(math.cos(half), axis.x * s, axis.y * s, axis.z * s)


def mul(p: UnitQuat, q: UnitQuat) -> UnitQuat:
    """Hamilton product p ⊗ q: (p0*q0 - P.Q, p0*Q + q0*P + PxQ)."""
    return UnitQuat(
        p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
    )


def conjugate(q: UnitQuat) -> UnitQuat:
    return UnitQuat(q.w, -q.x, -q.y, -q.z)


def inverse(q: UnitQuat) -> UnitQuat:
    # for unit quaternions the inverse coincides with the conjugate
    return conjugate(q)


def rotate_vec(q: UnitQuat, v: Vec3) -> Vec3:
    """Rotate ``v`` by ``q``: the vector part of q ⊗ (0, v) ⊗ q*."""
    # expanded sandwich product, no intermediate quaternion allocation
    tx = 2.0 * (q.y * v.z - q.z * v.y)
    ty = 2.0 * (q.z * v.x - q.x * v.z)
    tz = 2.0 * (q.x * v.y - q.y * v.x)
    return Vec3(
        v.x + q.w * tx + (q.y * tz - q.z * ty),
        v.y + q.w * ty + (q.z * tx - q.x * tz),
        v.z + q.w * tz + (q.x * ty - q.y * tx),
    )


def to_axis_angle(q: UnitQuat) -> Tuple[Vec3, float]:
    """Extract (unit axis, angle in [0, 180] degrees).

    The null rotation returns axis (0, 0, 1) by convention.
    """
    w, vx, vy, vz = q.w, q.x, q.y, q.z
    if w < 0.0:  # fold to the [0, 180] branch of the double cover
        w, vx, vy, vz = -w, -vx, -vy, -vz
    s = math.sqrt(vx * vx + vy * vy + vz * vz)
    angle = math.degrees(2.0 * math.atan2(s, w))
    if angle < 1e-7:
        return Z_AXIS, angle
    return Vec3(vx / s, vy / s, vz / s), angle


def angle_deg(q: UnitQuat) -> float:
    """Rotation angle of q in [0, 180] degrees."""
    return to_axis_angle(q)[1]


def angle_between(p: UnitQuat, q: UnitQuat) -> float:
    """Geodesic angle between two rotations, in degrees."""
    return angle_deg(mul(inverse(p), q))


def approx_equal(p: UnitQuat, q: UnitQuat, tol: float = 1e-9) -> bool:
    """Rotation equality, treating q and -q as the same rotation."""
    d_minus = math.sqrt(
        (p.w - q.w) ** 2 + (p.x - q.x) ** 2 + (p.y - q.y) ** 2 + (p.z - q.z) ** 2
    )
    d_plus = math.sqrt(
        (p.w + q.w) ** 2 + (p.x + q.x) ** 2 + (p.y + q.y) ** 2 + (p.z + q.z) ** 2
    )
    return min(d_minus, d_plus) < tol


def slerp(a: UnitQuat, b: UnitQuat, t: float) -> UnitQuat:
    """Spherical linear interpolation along the shortest arc.

    Endpoints are exact: t=0 gives a, t=1 gives b. Nearly parallel inputs
    fall back to normalized linear interpolation.
    """
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"interpolation fraction must be in [0, 1], got {t}")
    if t == 0.0:
        return a
    if t == 1.0:
        return b
    dot = a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z
    bw, bx, by, bz = b.w, b.x, b.y, b.z
    if dot < 0.0:  # take the short way around
        dot = -dot
        bw, bx, by, bz = -bw, -bx, -by, -bz
    if dot > 1.0 - 1e-10:
        # a ~ +-b: lerp then let the constructor renormalize
        return UnitQuat(
            a.w + t * (bw - a.w),
            a.x + t * (bx - a.x),
            a.y + t * (by - a.y),
            a.z + t * (bz - a.z),
        )
    theta = math.acos(min(1.0, dot))
    sin_theta = math.sin(theta)
    ka = math.sin((1.0 - t) * theta) / sin_theta
    kb = math.sin(t * theta) / sin_theta
    return UnitQuat(
        ka * a.w + kb * bw,
        ka * a.x + kb * bx,
        ka * a.y + kb * by,
        ka * a.z + kb * bz,
    )


# Euler conventions are intrinsic: each rotation is about the axis of the
# frame produced by the rotations before it.

_SINGULAR_TOL_DEG = 1e-6


def from_euler(r1: float, r2: float, r3: float, convention: str) -> UnitQuat:
    """Compose a quaternion from intrinsic Euler angles in degrees."""
    if convention == "YZY":
        return mul(mul(_qy(r1), _qz(r2)), _qy(r3))
    if convention == "ZXY":
        return mul(mul(_qz(r1), _qx(r2)), _qy(r3))
    raise DomainError(f"unknown Euler convention {convention!r}")


def to_euler(q: UnitQuat, convention: str) -> EulerTriple:
    """Decompose a quaternion into intrinsic Euler angles in degrees.

    At a gimbal singularity (middle angle at the degenerate value) the
    returned triple is flagged and r1 absorbs the combined end rotations.
    """
    if convention == "YZY":
        return _to_yzy(q)
    if convention == "ZXY":
        return _to_zxy(q)
    raise DomainError(f"unknown Euler convention {convention!r}")


def _qx(deg: float) -> UnitQuat:
    half = math.radians(deg) * 0.5
    return UnitQuat(math.cos(half), math.sin(half), 0.0, 0.0)


def _qy(deg: float) -> UnitQuat:
    half = math.radians(deg) * 0.5
    return UnitQuat(math.cos(half), 0.0, math.sin(half), 0.0)


def _qz(deg: float) -> UnitQuat:
    half = math.radians(deg) * 0.5
    return UnitQuat(math.cos(half), 0.0, 0.0, math.sin(half))


# sin of the singular window; comparing the sine of the middle angle keeps
# the detection well conditioned where asin/acos lose precision
_SINGULAR_SIN = math.sin(math.radians(_SINGULAR_TOL_DEG))


def _to_yzy(q: UnitQuat) -> EulerTriple:
    w, x, y, z = q.w, q.x, q.y, q.z
    # rotation matrix entries needed for the YZY split
    m11 = 1.0 - 2.0 * (x * x + z * z)
    m10 = 2.0 * (x * y + w * z)
    m12 = 2.0 * (y * z - w * x)
    sin_r2 = math.hypot(m10, m12)
    m00 = 1.0 - 2.0 * (y * y + z * z)
    m02 = 2.0 * (x * z + w * y)
    if sin_r2 < _SINGULAR_SIN:
        if m11 > 0.0:
            # pure Y rotation: only r1 + r3 is observable
            return EulerTriple(math.degrees(math.atan2(m02, m00)), 0.0, 0.0, "YZY", True)
        # only r1 - r3 is observable
        return EulerTriple(math.degrees(math.atan2(m02, -m00)), 180.0, 0.0, "YZY", True)
    r2 = math.degrees(math.atan2(sin_r2, m11))
    m01 = 2.0 * (x * y - w * z)
    m21 = 2.0 * (y * z + w * x)
    r1 = math.degrees(math.atan2(m21, -m01))
    r3 = math.degrees(math.atan2(m12, m10))
    return EulerTriple(r1, r2, r3, "YZY", False)


def _to_zxy(q: UnitQuat) -> EulerTriple:
    w, x, y, z = q.w, q.x, q.y, q.z
    m21 = 2.0 * (y * z + w * x)
    m20 = 2.0 * (x * z - w * y)
    m22 = 1.0 - 2.0 * (x * x + y * y)
    cos_r2 = math.hypot(m20, m22)
    m00 = 1.0 - 2.0 * (y * y + z * z)
    m02 = 2.0 * (x * z + w * y)
    if cos_r2 < _SINGULAR_SIN:
        if m21 > 0.0:
            # only r1 + r3 is observable
            return EulerTriple(math.degrees(math.atan2(m02, m00)), 90.0, 0.0, "ZXY", True)
        # only r1 - r3 is observable
        return EulerTriple(math.degrees(math.atan2(-m02, m00)), -90.0, 0.0, "ZXY", True)
    r2 = math.degrees(math.atan2(m21, cos_r2))
    m01 = 2.0 * (x * y - w * z)
    m11 = 1.0 - 2.0 * (x * x + z * z)
    r1 = math.degrees(math.atan2(-m01, m11))
    r3 = math.degrees(math.atan2(-m20, m22))
    return EulerTriple(r1, r2, r3, "ZXY", False)


def wrap_deg(a: float) -> float:
    """Wrap an angle to (-180, 180] degrees."""
    r = math.fmod(a, 360.0)
    if r <= -180.0:
        r += 360.0
    elif r > 180.0:
        r -= 360.0
    return r
