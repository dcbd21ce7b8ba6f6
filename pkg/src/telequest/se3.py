"""Rigid-body pose algebra underlying relative-motion end-effector control.

Conventions:
    - Quaternions are Hamilton (w, x, y, z), always unit norm, and canonical
      with w >= 0 so every rotation has exactly one representation.
    - ``quat_mul(a, b)`` is the rotation b-then-a, matching rotation-matrix
      multiplication R_a @ R_b.
    - Relative motion between two poses is expressed in the fixed world/base
      frame: equal world-space displacements produce equal deltas no matter
      how the moving body is oriented.

Everything here is a pure function over immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# |norm^2 - 1| below this skips rescaling so that already-unit quaternions
# keep their exact bits (codec round-trips must be bit-stable).
_RENORM_EPS = 1e-12


@dataclass(frozen=True)
class Vec3:
    """3-vector in meters (or unitless for axis directions)."""

    x: float
    y: float
    z: float

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def scaled(self, s: float) -> "Vec3":
        return Vec3(self.x * s, self.y * s, self.z * s)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)


ZERO_VEC = Vec3(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class UnitQuat:
    """Unit quaternion, canonical form (w >= 0).

    Construct through :meth:`normalized` or the ``quat_*`` operations; the
    raw constructor trusts its inputs.
    """

    w: float
    x: float
    y: float
    z: float

    @classmethod
    def normalized(cls, w: float, x: float, y: float, z: float) -> "UnitQuat":
        """Rescale to unit norm and canonicalize the sign.

        Raises ValueError if the components are not finite or are all
        (near) zero.
        """
        n2 = w * w + x * x + y * y + z * z
        if not math.isfinite(n2) or n2 < 1e-12:
            raise ValueError(f"degenerate quaternion ({w}, {x}, {y}, {z})")
        if abs(n2 - 1.0) > _RENORM_EPS:
            n = math.sqrt(n2)
            w, x, y, z = w / n, x / n, y / n, z / n
        if w < 0.0:
            w, x, y, z = -w, -x, -y, -z
        return cls(w, x, y, z)

    def norm(self) -> float:
        return math.sqrt(self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z)


IDENTITY_QUAT = UnitQuat(1.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Pose:
    """Position plus orientation of a rigid body."""

    position: Vec3
    orientation: UnitQuat


IDENTITY_POSE = Pose(ZERO_VEC, IDENTITY_QUAT)


@dataclass(frozen=True)
class PoseDelta:
    """World-frame relative motion: translation in meters plus a rotation
    delta that left-multiplies the orientation it is applied to."""

    translation: Vec3
    rotation: UnitQuat


ZERO_DELTA = PoseDelta(ZERO_VEC, IDENTITY_QUAT)


def quat_mul(a: UnitQuat, b: UnitQuat) -> UnitQuat:
    """Hamilton product a*b: the rotation that applies b first, then a."""
    return UnitQuat.normalized(
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    )


def quat_inverse(q: UnitQuat) -> UnitQuat:
    """Inverse rotation (conjugate, since q is unit)."""
    return UnitQuat.normalized(q.w, -q.x, -q.y, -q.z)


def quat_rotate(q: UnitQuat, v: Vec3) -> Vec3:
    """Rotate v by q, i.e. q * (0, v) * q^-1."""
    # t = 2 (q_vec x v); v' = v + w t + q_vec x t
    qv = Vec3(q.x, q.y, q.z)
    t = qv.cross(v).scaled(2.0)
    return v + t.scaled(q.w) + qv.cross(t)


def quat_from_axis_angle(axis: Vec3, angle: float) -> UnitQuat:
    """Rotation of ``angle`` radians about ``axis`` (need not be unit length)."""
    n = axis.norm()
    if n == 0.0:
        raise ValueError("rotation axis must be nonzero")
    half = 0.5 * angle
    s = math.sin(half) / n
    return UnitQuat.normalized(math.cos(half), axis.x * s, axis.y * s, axis.z * s)


def quat_to_axis_angle(q: UnitQuat) -> tuple[Vec3, float]:
    """Unit axis and angle in [0, pi] (canonical w >= 0 keeps it there).

    The identity rotation reports axis (1, 0, 0), angle 0.
    """
    vn = math.sqrt(q.x * q.x + q.y * q.y + q.z * q.z)
    if vn < 1e-12:
        return Vec3(1.0, 0.0, 0.0), 0.0
    angle = 2.0 * math.atan2(vn, q.w)
    return Vec3(q.x / vn, q.y / vn, q.z / vn), angle


def relative_delta(anchor: Pose, current: Pose, alignment: UnitQuat = IDENTITY_QUAT) -> PoseDelta:
    """Motion of ``current`` relative to ``anchor``, mapped through ``alignment``.

    The delta is measured in the fixed world frame (the anchor's own
    orientation does not rotate it) and then conjugated into the robot base
    frame by the static alignment rotation. With identity alignment this is
    the raw world-frame delta.
    """
    translation = quat_rotate(alignment, current.position - anchor.position)
    world_rot = quat_mul(current.orientation, quat_inverse(anchor.orientation))
    rotation = quat_mul(quat_mul(alignment, world_rot), quat_inverse(alignment))
    return PoseDelta(translation, rotation)


def apply_delta(ee_anchor: Pose, delta: PoseDelta, gain: float = 1.0) -> Pose:
    """Target pose: anchor displaced by gain * translation, rotated by the
    world-frame rotation delta.

    Gain scales translation only; scaling a rotation delta has no unique
    meaning, so rotations always apply at unit gain.
    """
    position = ee_anchor.position + delta.translation.scaled(gain)
    orientation = quat_mul(delta.rotation, ee_anchor.orientation)
    return Pose(position, orientation)
