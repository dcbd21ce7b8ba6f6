"""Kinematic arm plant: a rate-limited target follower.

Stands in for the real Cartesian controller and gripper driver. There is no
inertia model; the plant chases its target in a straight line at up to v_max,
rotates along the geodesic at up to omega_max, and slews the gripper fingers
at up to finger_speed, all while staying inside an axis-aligned workspace
box. That reproduces the two observable behaviours the control layer must
survive: command lag and target clamping.

Targets are stored verbatim (even if unreachable); clamping happens in
``step`` so that the commanded value is always visible to observers.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

from .se3 import (
    Pose,
    Vec3,
    quat_from_axis_angle,
    quat_inverse,
    quat_mul,
    quat_to_axis_angle,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PlantLimits:
    workspace_min: Vec3
    workspace_max: Vec3
    v_max: float = 0.5  # m/s
    omega_max: float = 1.5  # rad/s
    finger_speed: float = 0.1  # m/s, full 50 mm stroke in half a second
    finger_min: float = 0.0
    finger_max: float = 0.05


def validate_limits(limits: PlantLimits, where: str = "limits") -> None:
    for name in ("v_max", "omega_max", "finger_speed"):
        if not getattr(limits, name) > 0.0:
            raise ValueError(f"{where}.{name} must be > 0, got {getattr(limits, name)}")
    if not limits.finger_min < limits.finger_max:
        raise ValueError(
            f"{where}.finger_min/finger_max must satisfy min < max, got "
            f"[{limits.finger_min}, {limits.finger_max}]"
        )
    lo, hi = limits.workspace_min, limits.workspace_max
    for axis in ("x", "y", "z"):
        if not getattr(lo, axis) < getattr(hi, axis):
            raise ValueError(f"{where}.workspace must satisfy min < max on axis {axis}")


@dataclass(frozen=True)
class ArmPlantState:
    arm_id: str
    pose: Pose
    finger_distance: float
    target: Pose | None
    gripper_target: float


# Default per-arm workspaces: a 1 m cube each, offset +-0.3 m laterally so the
# two arms sit side by side.
_LATERAL_OFFSET = 0.3


def default_limits(arm_id: str) -> PlantLimits:
    side = _LATERAL_OFFSET if arm_id == "left" else -_LATERAL_OFFSET
    return PlantLimits(
        workspace_min=Vec3(-0.5, side - 0.5, 0.0),
        workspace_max=Vec3(0.5, side + 0.5, 1.0),
    )


def workspace_center(limits: PlantLimits) -> Vec3:
    lo, hi = limits.workspace_min, limits.workspace_max
    return Vec3((lo.x + hi.x) / 2.0, (lo.y + hi.y) / 2.0, (lo.z + hi.z) / 2.0)


def initial_plant(arm_id: str, limits: PlantLimits) -> ArmPlantState:
    """Plant at rest in the middle of its workspace, gripper fully open."""
    from .se3 import IDENTITY_QUAT

    return ArmPlantState(
        arm_id=arm_id,
        pose=Pose(workspace_center(limits), IDENTITY_QUAT),
        finger_distance=limits.finger_max,
        target=None,
        gripper_target=limits.finger_max,
    )


def clamp_to_workspace(position: Vec3, limits: PlantLimits) -> Vec3:
    lo, hi = limits.workspace_min, limits.workspace_max
    return Vec3(
        min(max(position.x, lo.x), hi.x),
        min(max(position.y, lo.y), hi.y),
        min(max(position.z, lo.z), hi.z),
    )


def set_target(state: ArmPlantState, pose: Pose) -> ArmPlantState:
    return replace(state, target=pose)


def clear_target(state: ArmPlantState) -> ArmPlantState:
    return replace(state, target=None)


def set_gripper(state: ArmPlantState, distance: float, limits: PlantLimits) -> ArmPlantState:
    clamped = min(max(distance, limits.finger_min), limits.finger_max)
    if clamped != distance:
        logger.warning(
            "gripper command %.4f m outside [%.4f, %.4f] on arm %s, clamped",
            distance, limits.finger_min, limits.finger_max, state.arm_id,
        )
    return replace(state, gripper_target=clamped)


def step(state: ArmPlantState, limits: PlantLimits, dt: float) -> ArmPlantState:
    """Advance the plant by dt seconds toward its targets.

    With no pose target the pose holds exactly. Position, geodesic rotation
    angle and finger travel are each bounded by their rate limit times dt;
    once within reach the plant lands exactly on the (clamped) target.
    """
    if not dt > 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")

    pose = state.pose
    if state.target is not None:
        goal = clamp_to_workspace(state.target.position, limits)
        offset = goal - pose.position
        dist = offset.norm()
        max_move = limits.v_max * dt
        if dist <= max_move:
            position = goal
        else:
            position = pose.position + offset.scaled(max_move / dist)

        error = quat_mul(state.target.orientation, quat_inverse(pose.orientation))
        axis, angle = quat_to_axis_angle(error)
        max_turn = limits.omega_max * dt
        if angle <= max_turn:
            orientation = state.target.orientation
        else:
            orientation = quat_mul(quat_from_axis_angle(axis, max_turn), pose.orientation)
        pose = Pose(position, orientation)

    finger_goal = min(max(state.gripper_target, limits.finger_min), limits.finger_max)
    travel = finger_goal - state.finger_distance
    max_travel = limits.finger_speed * dt
    if abs(travel) <= max_travel:
        finger = finger_goal
    else:
        finger = state.finger_distance + math.copysign(max_travel, travel)

    return replace(state, pose=pose, finger_distance=finger)
