// Scene state is a fold over the daemon's published stream and nothing
// else: no local simulation, no extrapolation. Reconnecting and replaying
// the stream rebuilds the identical scene.

import { Pose, poseEquals } from "./se3.js";
import { ArmId, ConnState, ControllerId, WireMessage } from "./protocol.js";

export interface ArmView {
  actual: Pose | null;
  marker: Pose | null;
  gripperDistance: number | null;
}

export interface ControllerView {
  state: ConnState;
  lastSeen: number | null;
}

export interface SceneState {
  arms: Record<ArmId, ArmView>;
  controllers: Record<ControllerId, ControllerView>;
  mode: string | null; // from session config, not the wire
  lastStamp: number | null;
  messageCount: number;
}

export function newScene(): SceneState {
  return {
    arms: {
      left: { actual: null, marker: null, gripperDistance: null },
      right: { actual: null, marker: null, gripperDistance: null },
    },
    controllers: {
      left: { state: "DISCONNECTED", lastSeen: null },
      right: { state: "DISCONNECTED", lastSeen: null },
    },
    mode: null,
    lastStamp: null,
    messageCount: 0,
  };
}

function wirePose(body: any): Pose {
  const p = body.pose;
  return {
    position: { x: p.position.x, y: p.position.y, z: p.position.z },
    orientation: {
      w: p.orientation.w, x: p.orientation.x, y: p.orientation.y, z: p.orientation.z,
    },
  };
}

export function applyMessage(scene: SceneState, msg: WireMessage): void {
  const body = msg.body as any;
  switch (msg.type) {
    case "ee_state":
      scene.arms[body.arm_id as ArmId].actual = wirePose(body);
      break;
    case "marker":
      scene.arms[body.arm_id as ArmId].marker = wirePose(body);
      break;
    case "gripper":
      scene.arms[body.arm_id as ArmId].gripperDistance = body.distance;
      break;
    case "status":
      scene.controllers[body.controller_id as ControllerId] = {
        state: body.state,
        lastSeen: body.last_seen ?? null,
      };
      break;
    default:
      return; // controller-direction traffic (pose/buttons/heartbeat): not scene state
  }
  scene.lastStamp = msg.stamp;
  scene.messageCount += 1;
}

// A paused arm's marker is published equal to its actual pose, bit for bit;
// any difference means the arm is chasing a live target.
export function markerCoincides(arm: ArmView): boolean {
  if (arm.actual === null || arm.marker === null) return true;
  return poseEquals(arm.actual, arm.marker);
}
