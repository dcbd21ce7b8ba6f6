#!/usr/bin/env python3
"""Connection watchdog and the two routing modes, on a deterministic clock.

A controller that goes silent longer than the timeout is declared
DISCONNECTED and its arm is force-paused where it stands; reconnection alone
never resumes motion (a human must press the button again). Mirror mode is
pure routing: the same input script drives the arms with hands exchanged.
"""

from telequest import Router, RoutingMode, SessionConfig, replay
from telequest.protocol import buttons_message, heartbeat_message, pose_message
from telequest.se3 import IDENTITY_QUAT, Pose, Vec3


def timed(messages):
    return [(m.stamp, m) for m in messages]


def hand(x):
    return Pose(Vec3(x, 0.0, 0.0), IDENTITY_QUAT)


def main():
    # engage, stream briefly, go silent for 0.8 s, then come back
    stream = [
        pose_message(1, 0.02, "left", hand(0.0)),
        buttons_message(1, 0.04, "left", False, True),
        buttons_message(2, 0.08, "left", False, False),
        pose_message(2, 0.10, "left", hand(0.05)),
        pose_message(3, 0.20, "left", hand(0.08)),
        # -- tracking drops out here --
        heartbeat_message(1, 1.0, "left"),
        pose_message(4, 1.05, "left", hand(0.30)),
        pose_message(5, 1.40, "left", hand(0.40)),
    ]

    published, events = replay(timed(stream), SessionConfig(), settle=0.3)
    print("watchdog timeline (timeout 0.5 s):")
    for e in events:
        print(f"  t={e.t:5.2f}  {e.kind:<10} {e.subject:<6} {e.detail}")
    targets = [m for m in published if m.type == "marker" and m.stamp > 0.7]
    moved = any(m.body["pose"]["position"]["x"] > 0.1 for m in targets)
    print(f"  arm chased the post-dropout poses: {moved}  (it must not)\n")

    # same two-controller script under both routing modes
    script = [
        pose_message(1, 0.02, "left", hand(0.0)),
        pose_message(2, 0.02, "right", hand(0.0)),
        buttons_message(1, 0.06, "left", False, True),
        buttons_message(2, 0.06, "right", False, True),
        pose_message(3, 0.30, "left", hand(0.10)),
        pose_message(4, 0.30, "right", hand(-0.10)),
    ]
    for mode in (RoutingMode.SIDE_BY_SIDE, RoutingMode.MIRROR):
        _, events = replay(timed(script), SessionConfig(mode=mode), settle=0.1)
        resumed = [e.subject for e in events if e.kind == "resume"]
        print(f"{mode.value:<13} left controller engaged arm: {resumed[0]}")


if __name__ == "__main__":
    main()
