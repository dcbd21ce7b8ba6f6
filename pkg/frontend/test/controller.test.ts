import { describe, expect, it } from "vitest";

import { VirtualController } from "../src/controller.js";
import { decode, encode } from "../src/protocol.js";

function drain(c: VirtualController, ticks: number, t0 = 0, dt = 1 / 30) {
  const out = [];
  for (let i = 0; i < ticks; i++) out.push(...c.tick(t0 + i * dt));
  return out;
}

describe("virtual controller sampling", () => {
  it("announces its pose on the first tick, then heartbeats while idle", () => {
    const c = new VirtualController("left");
    const msgs = drain(c, 5);
    expect(msgs[0].type).toBe("pose");
    expect(msgs.slice(1).every((m) => m.type === "heartbeat")).toBe(true);
    expect(msgs).toHaveLength(5);
  });

  it("collapses drag motion to one pose per tick, latest value", () => {
    const c = new VirtualController("right");
    c.tick(0);
    for (let i = 0; i < 50; i++) c.dragTranslate(2, 0); // 100 px total
    const msgs = c.tick(1 / 30);
    expect(msgs).toHaveLength(1);
    expect(msgs[0].type).toBe("pose");
    const pose = (msgs[0].body as any).pose;
    expect(pose.position.x).toBeCloseTo(0.1, 12); // 100 px at 0.001 m/px
  });

  it("screen-up maps to world +z, depth drag to world y", () => {
    const c = new VirtualController("right");
    c.dragTranslate(0, -50);
    c.dragDepth(-30);
    const pose = (c.tick(0)[0].body as any).pose;
    expect(pose.position.z).toBeCloseTo(0.05, 12);
    expect(pose.position.y).toBeCloseTo(0.03, 12);
  });

  it("never drops button edges, even several per tick", () => {
    const c = new VirtualController("left");
    c.tick(0);
    c.setButton("lower", true);
    c.setButton("lower", false);
    c.setButton("upper", true);
    const msgs = c.tick(1 / 30);
    const buttons = msgs.filter((m) => m.type === "buttons").map((m) => m.body as any);
    expect(buttons).toEqual([
      { controller_id: "left", upper: false, lower: true },
      { controller_id: "left", upper: false, lower: false },
      { controller_id: "left", upper: true, lower: false },
    ]);
  });

  it("ignores key auto-repeat (no retrigger while held)", () => {
    const c = new VirtualController("left");
    c.tick(0);
    c.setButton("lower", true);
    c.setButton("lower", true);
    c.setButton("lower", true);
    const presses = c.tick(1).filter((m) => m.type === "buttons");
    expect(presses).toHaveLength(1);
  });

  it("rotation drags compose into a unit orientation", () => {
    const c = new VirtualController("left");
    for (let i = 0; i < 200; i++) c.dragRotate(3, -2);
    const q = (c.tick(0)[0].body as any).pose.orientation;
    const norm = Math.hypot(q.w, q.x, q.y, q.z);
    expect(norm).toBeCloseTo(1, 9);
    expect(q.w).toBeGreaterThanOrEqual(0);
  });

  it("emits only valid protocol lines with monotonic per-type seq", () => {
    const c = new VirtualController("right");
    const lastSeq: Record<string, number> = {};
    for (let i = 0; i < 100; i++) {
      if (i % 3 === 0) c.dragTranslate(1, 1);
      if (i % 7 === 0) c.setButton("upper", i % 14 === 0);
      if (i % 11 === 0) c.setButton("lower", i % 22 === 0);
      for (const msg of c.tick(i / 30)) {
        const parsed = decode(encode(msg).trimEnd());
        expect(parsed).toEqual(msg);
        if (lastSeq[msg.type] !== undefined) expect(msg.seq).toBeGreaterThan(lastSeq[msg.type]);
        lastSeq[msg.type] = msg.seq;
      }
    }
  });

  it("sends one message per tick at the configured rate while idle", () => {
    const c = new VirtualController("left");
    const msgs = drain(c, 30); // one second at 30 Hz
    expect(msgs).toHaveLength(30);
  });
});
