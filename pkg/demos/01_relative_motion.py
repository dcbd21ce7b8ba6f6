#!/usr/bin/env python3
"""Relative-motion control law, step by step.

The end-effector never copies the controller's absolute coordinates. It
replays the controller's motion *relative to the pose it had when the
operator engaged*, starting from wherever the arm happened to be. Two
operators holding their controllers completely differently therefore
produce the same robot motion, and moving twice as far moves the arm twice
as far.
"""

import math

from telequest import (
    IDENTITY_QUAT,
    Pose,
    Vec3,
    apply_delta,
    quat_from_axis_angle,
    relative_delta,
)


def show(label, pose):
    p, q = pose.position, pose.orientation
    print(f"  {label:<28} pos=({p.x:+.3f}, {p.y:+.3f}, {p.z:+.3f})  quat=({q.w:+.3f}, {q.x:+.3f}, {q.y:+.3f}, {q.z:+.3f})")


def main():
    ee_start = Pose(Vec3(0.0, 0.3, 0.5), IDENTITY_QUAT)

    print("Two controllers anchored at very different poses:")
    anchor_a = Pose(Vec3(-0.2, 0.0, 0.9), IDENTITY_QUAT)
    anchor_b = Pose(Vec3(5.0, -2.0, 0.1), quat_from_axis_angle(Vec3(0, 0, 1), 2.1))
    show("anchor A", anchor_a)
    show("anchor B", anchor_b)

    print("\nBoth hands move +10 cm along world x and yaw 30 degrees:")
    shift = Vec3(0.10, 0.0, 0.0)
    yaw30 = quat_from_axis_angle(Vec3(0, 0, 1), math.radians(30))
    for name, anchor in (("A", anchor_a), ("B", anchor_b)):
        from telequest import quat_mul
        current = Pose(anchor.position + shift, quat_mul(yaw30, anchor.orientation))
        target = apply_delta(ee_start, relative_delta(anchor, current), gain=1.0)
        show(f"EE target via controller {name}", target)
    print("  -> identical targets: start pose cannot matter.\n")

    print("Moving twice the distance doubles the effect (gain 1):")
    for factor in (1.0, 2.0):
        current = Pose(anchor_a.position + shift.scaled(factor), anchor_a.orientation)
        target = apply_delta(ee_start, relative_delta(anchor_a, current), gain=1.0)
        show(f"hand moved {0.1 * factor:.1f} m", target)

    print("\nA translation gain rescales a small desk onto a big robot:")
    current = Pose(anchor_a.position + shift, anchor_a.orientation)
    for gain in (1.0, 2.5):
        target = apply_delta(ee_start, relative_delta(anchor_a, current), gain=gain)
        show(f"gain {gain}", target)
    print("  (rotation is never scaled; a fractional rotation has no unique meaning)")


if __name__ == "__main__":
    main()
