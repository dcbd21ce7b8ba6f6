// Wire protocol: one JSON object per line, identical over TCP and
// WebSocket. The daemon treats this client exactly like a headset-side
// one, so everything we send must validate against the same rules it
// applies to any controller stream.

import { Pose, quatNorm } from "./se3.js";

export type MessageType =
  | "pose"
  | "buttons"
  | "heartbeat"
  | "ee_state"
  | "marker"
  | "gripper"
  | "status";

export const MESSAGE_TYPES: ReadonlySet<string> = new Set([
  "pose", "buttons", "heartbeat", "ee_state", "marker", "gripper", "status",
]);

export type ControllerId = "left" | "right";
export type ArmId = "left" | "right";
export type ConnState = "CONNECTED" | "DISCONNECTED";

export interface WireMessage {
  type: MessageType;
  seq: number;
  stamp: number;
  body: Record<string, unknown>;
}

export class ProtocolError extends Error {}

const QUAT_TOLERANCE = 1e-6;

function checkPose(pose: any, where: string): void {
  const p = pose?.position;
  const q = pose?.orientation;
  for (const k of ["x", "y", "z"]) {
    if (typeof p?.[k] !== "number" || !isFinite(p[k])) {
      throw new ProtocolError(`${where}: position.${k} must be a finite number`);
    }
  }
  for (const k of ["w", "x", "y", "z"]) {
    if (typeof q?.[k] !== "number" || !isFinite(q[k])) {
      throw new ProtocolError(`${where}: orientation.${k} must be a finite number`);
    }
  }
  const n = quatNorm(q);
  if (Math.abs(n - 1) > QUAT_TOLERANCE) {
    throw new ProtocolError(`${where}: quaternion norm ${n} not within ${QUAT_TOLERANCE} of 1`);
  }
}

function checkId(value: unknown, field: string): void {
  if (value !== "left" && value !== "right") {
    throw new ProtocolError(`unknown ${field} ${JSON.stringify(value)}`);
  }
}

export function decode(line: string): WireMessage {
  let obj: any;
  try {
    obj = JSON.parse(line);
  } catch (err) {
    throw new ProtocolError(`not valid JSON: ${err}`);
  }
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new ProtocolError("message must be a JSON object");
  }
  if (typeof obj.type !== "string" || !MESSAGE_TYPES.has(obj.type)) {
    throw new ProtocolError(`unknown message type ${JSON.stringify(obj.type)}`);
  }
  if (!Number.isInteger(obj.seq)) throw new ProtocolError("seq must be an integer");
  if (typeof obj.stamp !== "number" || !isFinite(obj.stamp)) {
    throw new ProtocolError("stamp must be a finite number");
  }
  const body = obj.body;
  if (typeof body !== "object" || body === null) throw new ProtocolError("body must be an object");

  switch (obj.type as MessageType) {
    case "pose":
      checkId(body.controller_id, "controller_id");
      checkPose(body.pose, "pose");
      break;
    case "buttons":
      checkId(body.controller_id, "controller_id");
      if (typeof body.upper !== "boolean" || typeof body.lower !== "boolean") {
        throw new ProtocolError("buttons: upper/lower must be booleans");
      }
      break;
    case "heartbeat":
      checkId(body.controller_id, "controller_id");
      break;
    case "ee_state":
    case "marker":
      checkId(body.arm_id, "arm_id");
      checkPose(body.pose, obj.type);
      break;
    case "gripper":
      checkId(body.arm_id, "arm_id");
      if (typeof body.distance !== "number" || !isFinite(body.distance)) {
        throw new ProtocolError("gripper: distance must be a finite number");
      }
      break;
    case "status":
      checkId(body.controller_id, "controller_id");
      if (body.state !== "CONNECTED" && body.state !== "DISCONNECTED") {
        throw new ProtocolError(`status: unknown state ${JSON.stringify(body.state)}`);
      }
      break;
  }
  return obj as WireMessage;
}

export function encode(msg: WireMessage): string {
  // Key order matches the daemon's encoder so the byte stream diffs cleanly.
  return JSON.stringify({ type: msg.type, seq: msg.seq, stamp: msg.stamp, body: msg.body }) + "\n";
}

export function poseToWire(pose: Pose): Record<string, unknown> {
  return {
    position: { x: pose.position.x, y: pose.position.y, z: pose.position.z },
    orientation: {
      w: pose.orientation.w,
      x: pose.orientation.x,
      y: pose.orientation.y,
      z: pose.orientation.z,
    },
  };
}

export function poseMessage(seq: number, stamp: number, controller: ControllerId, pose: Pose): WireMessage {
  return { type: "pose", seq, stamp, body: { controller_id: controller, pose: poseToWire(pose) } };
}

export function buttonsMessage(
  seq: number, stamp: number, controller: ControllerId, upper: boolean, lower: boolean,
): WireMessage {
  return { type: "buttons", seq, stamp, body: { controller_id: controller, upper, lower } };
}

export function heartbeatMessage(seq: number, stamp: number, controller: ControllerId): WireMessage {
  return { type: "heartbeat", seq, stamp, body: { controller_id: controller } };
}
