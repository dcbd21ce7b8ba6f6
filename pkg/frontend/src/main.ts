// Browser wiring: WebSocket in, canvas out, mouse/keys -> virtual controller.
// Everything stateful lives in scene.ts / controller.ts; this file only
// adapts DOM events and draws primitive lists.

import { decode, encode, ProtocolError, ControllerId } from "./protocol.js";
import { applyMessage, markerCoincides, newScene, SceneState } from "./scene.js";
import { VirtualController } from "./controller.js";
import { buildScene, defaultCamera, Primitive, WorkspaceBox, ARM_COLORS } from "./renderer.js";

const canvas = document.getElementById("view") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const banner = document.getElementById("banner")!;
const hud = document.getElementById("hud")!;
const help = document.getElementById("help")!;

const params = new URLSearchParams(location.search);
const SEND_RATE = Number(params.get("rate") ?? 30);

let scene: SceneState = newScene();
let boxes: Partial<Record<"left" | "right", WorkspaceBox>> = {};
const camera = defaultCamera();
let active: ControllerId = "right";
const controllers = {
  left: new VirtualController("left"),
  right: new VirtualController("right"),
};
let ws: WebSocket | null = null;
let connected = false;
const startedAt = performance.now();

function now(): number {
  return (performance.now() - startedAt) / 1000;
}

async function sessionConfig(): Promise<any> {
  try {
    const resp = await fetch("/session-config.json");
    if (resp.ok) return await resp.json();
  } catch {
    /* served from elsewhere; fall back to defaults */
  }
  return null;
}

function wsUrl(config: any): string {
  const override = params.get("ws");
  if (override) return override;
  const port = config?.ws_port ?? 10711;
  return `ws://${location.hostname || "localhost"}:${port}`;
}

function connect(url: string): void {
  ws = new WebSocket(url);
  ws.onopen = () => {
    connected = true;
    scene = newScene(); // rebuild purely from the fresh stream
    banner.classList.add("hidden");
  };
  ws.onmessage = (event: MessageEvent) => {
    try {
      applyMessage(scene, decode(String(event.data)));
    } catch (err) {
      if (err instanceof ProtocolError) console.warn("dropped line:", err.message);
      else throw err;
    }
  };
  ws.onclose = () => {
    connected = false;
    banner.classList.remove("hidden"); // scene stays frozen as-is
    setTimeout(() => connect(url), 2000);
  };
}

// --- input -----------------------------------------------------------------

let dragging: "controller" | "camera" | null = null;

canvas.addEventListener("mousedown", (e) => {
  dragging = e.button === 2 || e.ctrlKey ? "camera" : "controller";
  e.preventDefault();
});
canvas.addEventListener("contextmenu", (e) => e.preventDefault());
window.addEventListener("mouseup", () => (dragging = null));
window.addEventListener("mousemove", (e) => {
  if (!dragging) return;
  if (dragging === "camera") {
    camera.yaw -= e.movementX * 0.008;
    camera.pitch = Math.min(1.5, Math.max(-1.5, camera.pitch + e.movementY * 0.008));
    return;
  }
  const c = controllers[active];
  if (e.altKey) c.dragRotate(e.movementX, e.movementY);
  else if (e.shiftKey) c.dragDepth(e.movementY);
  else c.dragTranslate(e.movementX, e.movementY);
});
canvas.addEventListener("wheel", (e) => {
  camera.distance = Math.min(8, Math.max(0.8, camera.distance + e.deltaY * 0.002));
  e.preventDefault();
});

window.addEventListener("keydown", (e) => {
  if (e.repeat) return; // edge semantics: auto-repeat must not retrigger
  if (e.key === "1") active = "left";
  else if (e.key === "2") active = "right";
  else if (e.key === "g") controllers[active].setButton("upper", true);
  else if (e.key === " ") {
    controllers[active].setButton("lower", true);
    e.preventDefault();
  } else if (e.key === "h") help.classList.toggle("hidden");
});
window.addEventListener("keyup", (e) => {
  if (e.key === "g") controllers[active].setButton("upper", false);
  else if (e.key === " ") controllers[active].setButton("lower", false);
});

// --- send loop ---------------------------------------------------------------

setInterval(() => {
  if (!connected || ws === null || ws.readyState !== WebSocket.OPEN) return;
  const t = now();
  for (const id of ["left", "right"] as ControllerId[]) {
    for (const msg of controllers[id].tick(t)) {
      ws.send(encode(msg));
    }
  }
}, 1000 / SEND_RATE);

// --- drawing -----------------------------------------------------------------

function drawPrimitives(primitives: Primitive[]): void {
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const sorted = primitives
    .filter((p) => p.kind !== "line" || (p.a.depth > 0.1 && p.b.depth > 0.1))
    .sort((a, b) => {
      const da = a.kind === "line" ? (a.a.depth + a.b.depth) / 2 : a.at.depth;
      const db = b.kind === "line" ? (b.a.depth + b.b.depth) / 2 : b.at.depth;
      return db - da;
    });
  for (const p of sorted) {
    if (p.kind === "line") {
      ctx.globalAlpha = p.alpha;
      ctx.strokeStyle = p.color;
      ctx.lineWidth = p.width;
      ctx.beginPath();
      ctx.moveTo(p.a.x, p.a.y);
      ctx.lineTo(p.b.x, p.b.y);
      ctx.stroke();
    } else {
      ctx.globalAlpha = 1;
      ctx.fillStyle = p.color;
      ctx.font = "13px system-ui";
      ctx.fillText(p.text, p.at.x, p.at.y);
    }
  }
  ctx.globalAlpha = 1;
}

function statusDot(state: string): string {
  return state === "CONNECTED" ? "🟢" : "🔴";
}

function renderHud(): void {
  const parts: string[] = [];
  parts.push(`mode: ${scene.mode ?? "?"}`);
  for (const id of ["left", "right"] as const) {
    const conn = scene.controllers[id];
    const arm = scene.arms[id];
    const engagement = arm.actual === null ? "-" : markerCoincides(arm) ? "anchored" : "tracking";
    const grip = arm.gripperDistance === null ? "-" : `${(arm.gripperDistance * 1000).toFixed(0)}mm`;
    const activeMark = id === active ? "▶" : " ";
    parts.push(
      `${activeMark}<span style="color:${ARM_COLORS[id]}">${id}</span> ${statusDot(conn.state)} ${engagement} grip:${grip}`,
    );
  }
  hud.innerHTML = parts.join(" &nbsp;|&nbsp; ");
}

function frame(): void {
  camera.viewWidth = canvas.width = canvas.clientWidth;
  camera.viewHeight = canvas.height = canvas.clientHeight;
  drawPrimitives(buildScene(scene, camera, boxes));
  renderHud();
  requestAnimationFrame(frame);
}

// --- boot ----------------------------------------------------------------------

sessionConfig().then((config) => {
  if (config) {
    scene.mode = config.mode ?? null;
    for (const id of ["left", "right"] as const) {
      const ws_ = config.arms?.[id]?.workspace;
      if (ws_) boxes[id] = { min: ws_.min, max: ws_.max };
    }
    const mode = config.mode ?? null;
    const fixMode = () => {
      scene.mode = mode;
    };
    // scene resets on every (re)connect; keep the static mode label applied
    setInterval(fixMode, 1000);
  }
  connect(wsUrl(config));
  requestAnimationFrame(frame);
});
