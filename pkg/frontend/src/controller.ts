// Virtual controller: drives one arm with mouse and keyboard instead of a
// tracked VR device. Emits exactly the wire protocol's pose / buttons /
// heartbeat messages.
//
// Sampling contract: pose samples are rate-limited to one per tick (the
// latest wins, intermediate drag positions are dropped), button edges are
// never dropped (each transition queues its own message), and an idle tick
// sends a heartbeat so the daemon's watchdog keeps trusting us.

import {
  ControllerId,
  WireMessage,
  buttonsMessage,
  heartbeatMessage,
  poseMessage,
} from "./protocol.js";
import { IDENTITY_QUAT, Pose, Quat, quatFromAxisAngle, quatMul, vec3 } from "./se3.js";

export interface ControllerOptions {
  translateScale: number; // meters per pixel
  rotateScale: number; // radians per pixel
}

export const DEFAULT_OPTIONS: ControllerOptions = {
  translateScale: 0.001,
  rotateScale: 0.008,
};

interface ButtonState {
  upper: boolean;
  lower: boolean;
}

export class VirtualController {
  readonly id: ControllerId;
  private readonly opts: ControllerOptions;
  private position = vec3(0, 0, 0);
  private orientation: Quat = IDENTITY_QUAT;
  private buttons: ButtonState = { upper: false, lower: false };
  private poseDirty = true; // announce our initial pose on the first tick
  private buttonQueue: ButtonState[] = [];
  private seq = { pose: 0, buttons: 0, heartbeat: 0 };

  constructor(id: ControllerId, opts: ControllerOptions = DEFAULT_OPTIONS) {
    this.id = id;
    this.opts = opts;
  }

  get pose(): Pose {
    return { position: { ...this.position }, orientation: { ...this.orientation } };
  }

  get buttonState(): ButtonState {
    return { ...this.buttons };
  }

  /** Plain drag: screen x -> world x, screen y (up) -> world z. */
  dragTranslate(dxPx: number, dyPx: number): void {
    this.position.x += dxPx * this.opts.translateScale;
    this.position.z -= dyPx * this.opts.translateScale;
    this.poseDirty = true;
  }

  /** Modifier drag: vertical motion maps to depth (world y). */
  dragDepth(dyPx: number): void {
    this.position.y -= dyPx * this.opts.translateScale;
    this.poseDirty = true;
  }

  /** Rotation drag: horizontal -> yaw about z, vertical -> pitch about x. */
  dragRotate(dxPx: number, dyPx: number): void {
    const yaw = quatFromAxisAngle(vec3(0, 0, 1), dxPx * this.opts.rotateScale);
    const pitch = quatFromAxisAngle(vec3(1, 0, 0), dyPx * this.opts.rotateScale);
    this.orientation = quatMul(quatMul(yaw, pitch), this.orientation);
    this.poseDirty = true;
  }

  /**
   * Key/button transition. Repeated presses of an already-down button
   * (browser key auto-repeat) are ignored; every real transition queues a
   * snapshot that will be sent even if several land between ticks.
   */
  setButton(which: "upper" | "lower", pressed: boolean): void {
    if (this.buttons[which] === pressed) return;
    this.buttons = { ...this.buttons, [which]: pressed };
    this.buttonQueue.push({ ...this.buttons });
  }

  /** One send-loop step; returns the wire messages due at `now` (seconds). */
  tick(now: number): WireMessage[] {
    const out: WireMessage[] = [];
    if (this.poseDirty) {
      this.seq.pose += 1;
      out.push(poseMessage(this.seq.pose, now, this.id, this.pose));
      this.poseDirty = false;
    }
    for (const snapshot of this.buttonQueue) {
      this.seq.buttons += 1;
      out.push(buttonsMessage(this.seq.buttons, now, this.id, snapshot.upper, snapshot.lower));
    }
    this.buttonQueue.length = 0;
    if (out.length === 0) {
      this.seq.heartbeat += 1;
      out.push(heartbeatMessage(this.seq.heartbeat, now, this.id));
    }
    return out;
  }
}
