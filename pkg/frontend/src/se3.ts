// Minimal pose algebra matching the daemon's conventions: Hamilton
// quaternions (w, x, y, z), unit norm, canonical w >= 0.

export interface Vec3 {
  x: number;
  y: number;
  z: number;
}

export interface Quat {
  w: number;
  x: number;
  y: number;
  z: number;
}

export interface Pose {
  position: Vec3;
  orientation: Quat;
}

export const IDENTITY_QUAT: Quat = { w: 1, x: 0, y: 0, z: 0 };

export function vec3(x: number, y: number, z: number): Vec3 {
  return { x, y, z };
}

export function add(a: Vec3, b: Vec3): Vec3 {
  return { x: a.x + b.x, y: a.y + b.y, z: a.z + b.z };
}

export function scale(v: Vec3, s: number): Vec3 {
  return { x: v.x * s, y: v.y * s, z: v.z * s };
}

export function quatNorm(q: Quat): number {
  return Math.sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
}

export function quatNormalize(q: Quat): Quat {
  const n = quatNorm(q);
  if (!isFinite(n) || n < 1e-6) throw new Error(`degenerate quaternion norm ${n}`);
  let { w, x, y, z } = q;
  if (Math.abs(n - 1) > 1e-12) {
    w /= n; x /= n; y /= n; z /= n;
  }
  return w < 0 ? { w: -w, x: -x, y: -y, z: -z } : { w, x, y, z };
}

// a*b: rotation b applied first, then a.
export function quatMul(a: Quat, b: Quat): Quat {
  return quatNormalize({
    w: a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
    x: a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
    y: a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
    z: a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
  });
}

export function quatFromAxisAngle(axis: Vec3, angle: number): Quat {
  const n = Math.sqrt(axis.x * axis.x + axis.y * axis.y + axis.z * axis.z);
  if (n === 0) throw new Error("rotation axis must be nonzero");
  const s = Math.sin(angle / 2) / n;
  return quatNormalize({ w: Math.cos(angle / 2), x: axis.x * s, y: axis.y * s, z: axis.z * s });
}

export function quatRotate(q: Quat, v: Vec3): Vec3 {
  // t = 2 (q_vec x v); v' = v + w t + q_vec x t
  const tx = 2 * (q.y * v.z - q.z * v.y);
  const ty = 2 * (q.z * v.x - q.x * v.z);
  const tz = 2 * (q.x * v.y - q.y * v.x);
  return {
    x: v.x + q.w * tx + (q.y * tz - q.z * ty),
    y: v.y + q.w * ty + (q.z * tx - q.x * tz),
    z: v.z + q.w * tz + (q.x * ty - q.y * tx),
  };
}

export function poseEquals(a: Pose, b: Pose): boolean {
  return (
    a.position.x === b.position.x &&
    a.position.y === b.position.y &&
    a.position.z === b.position.z &&
    a.orientation.w === b.orientation.w &&
    a.orientation.x === b.orientation.x &&
    a.orientation.y === b.orientation.y &&
    a.orientation.z === b.orientation.z
  );
}
