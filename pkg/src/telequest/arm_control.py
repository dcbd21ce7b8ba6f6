"""Per-arm teleoperation state machine.

Each arm is driven by one controller stream. While streaming, every
controller pose sample becomes an end-effector target: the controller's
motion relative to the anchor captured at the last resume, replayed from the
end-effector pose captured at the same moment. While paused the arm emits
nothing.

Buttons are edge-triggered on rising edges against the previous snapshot:
the lower button toggles pause/resume (re-anchoring on resume so the first
target equals the robot's actual pose, never a jump), the upper button
toggles the gripper between its configured open/closed finger distances.
If both buttons rise in the same snapshot only the pause/resume action
runs; a gripper toggle that fired during an engage/disengage would surprise
the operator. There is deliberately no hold-to-run mode: holding a button
down must stay compatible with pressing the other one.

Gripper toggling is allowed while paused; the two buttons are independent
except for the simultaneous-rising-edge rule above.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .se3 import IDENTITY_QUAT, Pose, UnitQuat, apply_delta, relative_delta


@dataclass(frozen=True)
class ButtonSnapshot:
    upper: bool = False
    lower: bool = False


@dataclass(frozen=True)
class GripperState:
    open: bool
    commanded_distance: float


@dataclass(frozen=True)
class ArmConfig:
    """Static per-arm parameters; validated by :func:`initial_state`."""

    gain: float = 1.0
    alignment: UnitQuat = IDENTITY_QUAT
    finger_min: float = 0.0
    finger_max: float = 0.05


@dataclass(frozen=True)
class ArmControllerState:
    streaming: bool
    controller_anchor: Pose | None
    ee_anchor: Pose | None
    gripper: GripperState
    last_buttons: ButtonSnapshot
    gain: float
    alignment: UnitQuat
    finger_min: float
    finger_max: float
    last_target: Pose | None


@dataclass(frozen=True)
class TargetPose:
    pose: Pose


@dataclass(frozen=True)
class GripperCommand:
    distance: float


@dataclass(frozen=True)
class Paused:
    pass


@dataclass(frozen=True)
class Resumed:
    """Carries the end-effector pose the arm was re-anchored to."""

    pose: Pose


ArmEvent = TargetPose | GripperCommand | Paused | Resumed


def initial_state(config: ArmConfig = ArmConfig()) -> ArmControllerState:
    """Fresh arm state: paused, unanchored, gripper open.

    Arms start paused rather than anchored-at-launch: the operator's first
    lower-button press anchors and engages, so a controller that is moving
    at startup cannot command a jump.
    """
    if not config.gain > 0.0:
        raise ValueError(f"gain must be > 0, got {config.gain}")
    if not config.finger_min < config.finger_max:
        raise ValueError(
            f"finger_min must be < finger_max, got [{config.finger_min}, {config.finger_max}]"
        )
    return ArmControllerState(
        streaming=False,
        controller_anchor=None,
        ee_anchor=None,
        gripper=GripperState(open=True, commanded_distance=config.finger_max),
        last_buttons=ButtonSnapshot(),
        gain=config.gain,
        alignment=config.alignment,
        finger_min=config.finger_min,
        finger_max=config.finger_max,
        last_target=None,
    )


def handle_pose(
    state: ArmControllerState, controller_pose: Pose, robot_actual: Pose
) -> tuple[ArmControllerState, TargetPose | None]:
    """Turn a controller pose sample into an end-effector target.

    Paused arms ignore the sample entirely. ``robot_actual`` is part of the
    call contract (callers always have the latest plant pose at hand) but
    the target is computed purely from the anchors, so clamping downstream
    can never feed back into the command stream.
    """
    if not state.streaming:
        return state, None
    assert state.controller_anchor is not None and state.ee_anchor is not None
    delta = relative_delta(state.controller_anchor, controller_pose, state.alignment)
    target = apply_delta(state.ee_anchor, delta, state.gain)
    return replace(state, last_target=target), TargetPose(target)


def handle_buttons(
    state: ArmControllerState,
    buttons: ButtonSnapshot,
    robot_actual: Pose,
    controller_pose: Pose,
) -> tuple[ArmControllerState, list[ArmEvent]]:
    """Apply one button snapshot, edge-triggered against the previous one."""
    lower_edge = buttons.lower and not state.last_buttons.lower
    upper_edge = buttons.upper and not state.last_buttons.upper
    events: list[ArmEvent] = []

    if lower_edge:
        if state.streaming:
            state = replace(state, streaming=False)
            events.append(Paused())
        else:
            state = replace(
                state,
                streaming=True,
                controller_anchor=controller_pose,
                ee_anchor=robot_actual,
                last_target=None,
            )
            events.append(Resumed(robot_actual))
    elif upper_edge:
        # Suppressed (not deferred) when the lower edge rises in the same
        # snapshot: pause/resume has priority.
        now_open = not state.gripper.open
        distance = state.finger_max if now_open else state.finger_min
        state = replace(state, gripper=GripperState(now_open, distance))
        events.append(GripperCommand(distance))

    return replace(state, last_buttons=buttons), events


def force_pause(state: ArmControllerState) -> tuple[ArmControllerState, Paused | None]:
    """Pause without a button press (watchdog trip). No-op if already paused."""
    if not state.streaming:
        return state, None
    return replace(state, streaming=False), Paused()
