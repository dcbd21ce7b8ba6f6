// Wireframe scene builder: arms are coordinate triads, targets are
// translucent triads, workspaces are boxes. Pure functions from scene state
// to 2D primitives; the canvas adapter in main.ts just draws the list.

import { Pose, Vec3, add, quatRotate, vec3 } from "./se3.js";
import { ArmId } from "./protocol.js";
import { SceneState, markerCoincides } from "./scene.js";

export interface Camera {
  target: Vec3;
  distance: number;
  yaw: number; // radians about +z
  pitch: number; // radians above the horizon
  viewWidth: number;
  viewHeight: number;
}

export function defaultCamera(): Camera {
  return { target: vec3(0, 0, 0.5), distance: 2.6, yaw: -2.3, pitch: 0.42, viewWidth: 960, viewHeight: 640 };
}

export interface Projected {
  x: number;
  y: number;
  depth: number;
}

export function project(cam: Camera, v: Vec3): Projected {
  // camera sits on an orbit around the target, z-up world
  const cy = Math.cos(cam.yaw), sy = Math.sin(cam.yaw);
  const cp = Math.cos(cam.pitch), sp = Math.sin(cam.pitch);
  const dx = v.x - cam.target.x, dy = v.y - cam.target.y, dz = v.z - cam.target.z;
  // rotate into camera-aligned axes: right, up, forward
  const rx = -sy * dx + cy * dy;
  const fz = cy * cp * dx + sy * cp * dy + sp * dz;
  const uz = -cy * sp * dx - sy * sp * dy + cp * dz;
  const depth = cam.distance - fz;
  const f = (0.9 * cam.viewHeight) / Math.max(depth, 0.1); // weak perspective
  return {
    x: cam.viewWidth / 2 + rx * f,
    y: cam.viewHeight / 2 - uz * f,
    depth,
  };
}

export interface LinePrimitive {
  kind: "line";
  a: Projected;
  b: Projected;
  color: string;
  width: number;
  alpha: number;
}

export interface TextPrimitive {
  kind: "text";
  at: Projected;
  text: string;
  color: string;
}

export type Primitive = LinePrimitive | TextPrimitive;

export const ARM_COLORS: Record<ArmId, string> = { left: "#4ea3ff", right: "#ffb347" };
const AXIS_COLORS = ["#ff5555", "#55cc55", "#6699ff"]; // x, y, z

export interface WorkspaceBox {
  min: Vec3;
  max: Vec3;
}

function line(cam: Camera, a: Vec3, b: Vec3, color: string, width: number, alpha: number): LinePrimitive {
  return { kind: "line", a: project(cam, a), b: project(cam, b), color, width, alpha };
}

export function triad(cam: Camera, pose: Pose, size: number, width: number, alpha: number): Primitive[] {
  const axes = [vec3(size, 0, 0), vec3(0, size, 0), vec3(0, 0, size)];
  return axes.map((axis, i) =>
    line(cam, pose.position, add(pose.position, quatRotate(pose.orientation, axis)), AXIS_COLORS[i], width, alpha),
  );
}

export function boxEdges(cam: Camera, box: WorkspaceBox, color: string): Primitive[] {
  const { min, max } = box;
  const corners = [
    vec3(min.x, min.y, min.z), vec3(max.x, min.y, min.z),
    vec3(max.x, max.y, min.z), vec3(min.x, max.y, min.z),
    vec3(min.x, min.y, max.z), vec3(max.x, min.y, max.z),
    vec3(max.x, max.y, max.z), vec3(min.x, max.y, max.z),
  ];
  const edges: [number, number][] = [
    [0, 1], [1, 2], [2, 3], [3, 0],
    [4, 5], [5, 6], [6, 7], [7, 4],
    [0, 4], [1, 5], [2, 6], [3, 7],
  ];
  return edges.map(([i, j]) => line(cam, corners[i], corners[j], color, 1, 0.35));
}

function gripperJaws(cam: Camera, pose: Pose, distance: number, color: string): Primitive[] {
  // two finger ticks either side of the tool z axis, gap = finger distance
  const half = distance / 2 + 0.004;
  const out: Primitive[] = [];
  for (const side of [-1, 1]) {
    const base = add(pose.position, quatRotate(pose.orientation, vec3(side * half, 0, 0)));
    const tip = add(pose.position, quatRotate(pose.orientation, vec3(side * half, 0, 0.05)));
    out.push(line(cam, base, tip, color, 3, 0.9));
  }
  return out;
}

export function buildScene(
  scene: SceneState,
  cam: Camera,
  boxes: Partial<Record<ArmId, WorkspaceBox>>,
): Primitive[] {
  const out: Primitive[] = [];
  for (const armId of ["left", "right"] as ArmId[]) {
    const box = boxes[armId];
    if (box) out.push(...boxEdges(cam, box, ARM_COLORS[armId]));
  }
  for (const armId of ["left", "right"] as ArmId[]) {
    const arm = scene.arms[armId];
    if (arm.marker && !markerCoincides(arm)) {
      // live target leads the arm: draw it translucent
      out.push(...triad(cam, arm.marker, 0.14, 2, 0.35));
    }
    if (arm.actual) {
      out.push(...triad(cam, arm.actual, 0.12, 3, 1.0));
      if (arm.marker && markerCoincides(arm)) {
        // paused: marker rides exactly on the arm; a faint halo says so
        out.push(...triad(cam, arm.marker, 0.16, 1, 0.25));
      }
      if (arm.gripperDistance !== null) {
        out.push(...gripperJaws(cam, arm.actual, arm.gripperDistance, ARM_COLORS[armId]));
      }
      const label = project(cam, add(arm.actual.position, vec3(0, 0, 0.2)));
      out.push({ kind: "text", at: label, text: armId, color: ARM_COLORS[armId] });
    }
  }
  return out;
}
