import { describe, expect, it } from "vitest";

import { quatFromAxisAngle, quatMul, quatNormalize, quatRotate, vec3 } from "../src/se3.js";

// Frozen from the daemon's implementation: both sides must agree on the
// Hamilton convention and canonical form, bit for bit at double precision.
const MUL_CASES = [
  {
    a: [0.8253356149096783, 0.0, 0.0, 0.5646424733950354],
    b: [0.9393727128473789, -0.34289780745545134, -0.0, -0.0],
    mul: [0.7752977555872641, -0.2830057727674254, -0.19361466612338066, 0.5304097320219483],
  },
  {
    a: [0.9393727128473789, -0.34289780745545134, -0.0, -0.0],
    b: [0.12050276936736662, 0.4052733815123637, 0.8105467630247274, -0.4052733815123637],
    mul: [0.2521643673068914, 0.33938262042771994, 0.6224381577315535, -0.6586374637173922],
  },
  {
    a: [0.12050276936736662, 0.4052733815123637, 0.8105467630247274, -0.4052733815123637],
    b: [0.8253356149096783, 0.0, 0.0, 0.5646424733950354],
    mul: [0.3282897917924455, 0.792155684613653, 0.4401385465357518, -0.26644557379048994],
  },
];

const ROTATE_CASES = [
  {
    q: [0.8253356149096783, 0.0, 0.0, 0.5646424733950354],
    v: [0.3, -0.2, 0.8],
    out: [0.29511514353644736, 0.2071401748948332, 0.8],
  },
  {
    q: [0.12050276936736662, 0.4052733815123637, 0.8105467630247274, -0.4052733815123637],
    v: [0.3, -0.2, 0.8],
    out: [-0.45018879281258783, -0.5045362591258169, -0.5592613110642214],
  },
];

function quat([w, x, y, z]: number[]) {
  return { w, x, y, z };
}

describe("quaternion algebra", () => {
  it("matches the daemon's products", () => {
    for (const c of MUL_CASES) {
      const got = quatMul(quat(c.a), quat(c.b));
      expect(got.w).toBeCloseTo(c.mul[0], 12);
      expect(got.x).toBeCloseTo(c.mul[1], 12);
      expect(got.y).toBeCloseTo(c.mul[2], 12);
      expect(got.z).toBeCloseTo(c.mul[3], 12);
    }
  });

  it("matches the daemon's rotations", () => {
    for (const c of ROTATE_CASES) {
      const got = quatRotate(quat(c.q), vec3(c.v[0], c.v[1], c.v[2]));
      expect(got.x).toBeCloseTo(c.out[0], 12);
      expect(got.y).toBeCloseTo(c.out[1], 12);
      expect(got.z).toBeCloseTo(c.out[2], 12);
    }
  });

  it("canonicalizes to w >= 0 and unit norm", () => {
    const q = quatNormalize({ w: -2, x: 0, y: 0, z: 2 });
    expect(q.w).toBeCloseTo(Math.SQRT1_2, 12);
    expect(q.z).toBeCloseTo(-Math.SQRT1_2, 12);
  });

  it("quarter turn about z rotates x to y", () => {
    const q = quatFromAxisAngle(vec3(0, 0, 1), Math.PI / 2);
    const v = quatRotate(q, vec3(1, 0, 0));
    expect(v.x).toBeCloseTo(0, 12);
    expect(v.y).toBeCloseTo(1, 12);
  });

  it("rejects degenerate quaternions", () => {
    expect(() => quatNormalize({ w: 0, x: 0, y: 0, z: 0 })).toThrow();
  });
});
