#!/usr/bin/env python3
"""Pause, re-pose, resume: the anchor reset in action.

The lower controller button toggles the command stream. While paused the
operator can move freely; on resume both anchors reset (controller anchor to
the hand's current pose, end-effector anchor to the robot's actual pose), so
the first new target is exactly where the robot already is. There is no way
to produce a jump, no matter how far the hand wandered.
"""

from telequest import (
    ArmConfig,
    ButtonSnapshot,
    IDENTITY_QUAT,
    Pose,
    Vec3,
    handle_buttons,
    handle_pose,
    initial_state,
)

PRESS = ButtonSnapshot(lower=True)
RELEASE = ButtonSnapshot()


def main():
    robot = Pose(Vec3(0.0, 0.3, 0.5), IDENTITY_QUAT)
    state = initial_state(ArmConfig())

    hand = Pose(Vec3(0.0, 0.0, 1.0), IDENTITY_QUAT)
    state, events = handle_buttons(state, PRESS, robot, hand)
    print(f"engage at hand z=1.0          -> {events[0].__class__.__name__}, streaming={state.streaming}")
    state, _ = handle_buttons(state, RELEASE, robot, hand)

    hand = Pose(Vec3(0.15, 0.0, 1.0), IDENTITY_QUAT)
    state, event = handle_pose(state, hand, robot)
    robot = event.pose  # pretend the plant converged
    print(f"hand +0.15 x                  -> target x={event.pose.position.x:+.3f}")

    state, events = handle_buttons(state, PRESS, robot, hand)
    state, _ = handle_buttons(state, RELEASE, robot, hand)
    print(f"pause                         -> {events[0].__class__.__name__}")

    hand = Pose(Vec3(-3.0, 2.0, 0.2), IDENTITY_QUAT)  # wander far away
    state, event = handle_pose(state, hand, robot)
    print(f"hand wanders to x=-3.0        -> event: {event} (paused arms ignore motion)")

    state, events = handle_buttons(state, PRESS, robot, hand)
    print(f"resume                        -> re-anchored at robot x={events[0].pose.position.x:+.3f}")
    state, event = handle_pose(state, hand, robot)
    print(f"first post-resume sample      -> target x={event.pose.position.x:+.3f}  (== robot, no jump)")

    hand = Pose(Vec3(-2.95, 2.0, 0.2), IDENTITY_QUAT)
    state, event = handle_pose(state, hand, robot)
    print(f"hand +0.05 x from new anchor  -> target x={event.pose.position.x:+.3f}")
    print("\nfine-tune / pause / re-grip / continue, forever, without jumps.")


if __name__ == "__main__":
    main()
