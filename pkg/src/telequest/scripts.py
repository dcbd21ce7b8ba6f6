"""Predefined controller-input scripts: clean, deterministic pose streams.

A script replaces the physical VR controller for testing and debugging. It
mixes explicit timed events (pose samples, button snapshots, silence gaps)
with parametric generators (straight lines, circles, constant-rate
rotations) that expand into rate-spaced pose samples. Expansion is a pure
function: the same script always yields byte-identical message sequences,
which is what makes golden-log regression tests possible.

Silence gaps model tracking dropout: every message from the affected
controller inside the window is suppressed, including generator samples and
the idle heartbeats that otherwise keep the connection watchdog happy.
"""

from __future__ import annotations

import json
import math
import socket
import threading
import time
from dataclasses import dataclass

from .protocol import (
    CONTROLLER_IDS,
    WireMessage,
    buttons_message,
    encode,
    heartbeat_message,
    pose_from_wire,
    pose_message,
)
from .se3 import IDENTITY_QUAT, Pose, UnitQuat, Vec3, quat_from_axis_angle, quat_mul

ZERO = Vec3(0.0, 0.0, 0.0)

_PLANES = {
    "xy": (Vec3(1.0, 0.0, 0.0), Vec3(0.0, 1.0, 0.0)),
    "yz": (Vec3(0.0, 1.0, 0.0), Vec3(0.0, 0.0, 1.0)),
    "xz": (Vec3(1.0, 0.0, 0.0), Vec3(0.0, 0.0, 1.0)),
}


class ScriptError(ValueError):
    """Invalid script document."""


@dataclass(frozen=True)
class ScriptEvent:
    """One explicit timed item; exactly one of pose / buttons / silence."""

    t: float
    controller_id: str
    pose: Pose | None = None
    buttons: tuple[bool, bool] | None = None  # (upper, lower)
    silence: float | None = None


@dataclass(frozen=True)
class Generator:
    kind: str  # "line" | "circle" | "rotation"
    controller_id: str
    t0: float
    duration: float
    # line
    start: Vec3 = ZERO
    end: Vec3 = ZERO
    # circle
    center: Vec3 = ZERO
    radius: float = 0.0
    plane: str = "xy"
    revolutions: float = 1.0
    # rotation
    axis: Vec3 = Vec3(0.0, 0.0, 1.0)
    angle: float = 0.0
    # pose held constant where the segment does not vary it
    position: Vec3 = ZERO
    orientation: UnitQuat = IDENTITY_QUAT


@dataclass(frozen=True)
class Script:
    name: str
    rate: float
    events: tuple[ScriptEvent, ...] = ()
    generators: tuple[Generator, ...] = ()


def _vec(obj, where: str) -> Vec3:
    try:
        return Vec3(float(obj["x"]), float(obj["y"]), float(obj["z"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ScriptError(f"{where}: expected {{x,y,z}}, got {obj!r}") from exc


def _quat(obj, where: str) -> UnitQuat:
    try:
        return UnitQuat.normalized(float(obj["w"]), float(obj["x"]), float(obj["y"]), float(obj["z"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ScriptError(f"{where}: expected unit {{w,x,y,z}}, got {obj!r}") from exc


def _controller(obj, where: str) -> str:
    cid = obj.get("controller")
    if cid not in CONTROLLER_IDS:
        raise ScriptError(f"{where}: controller must be one of {CONTROLLER_IDS}, got {cid!r}")
    return cid


def load_script(doc: dict) -> Script:
    """Parse and validate a script document (already JSON-decoded)."""
    if not isinstance(doc, dict):
        raise ScriptError("script must be a JSON object")
    rate = doc.get("rate", 60.0)
    if not isinstance(rate, (int, float)) or isinstance(rate, bool) or not rate > 0:
        raise ScriptError(f"rate must be a positive number, got {rate!r}")

    events = []
    for i, entry in enumerate(doc.get("events", [])):
        where = f"events[{i}]"
        cid = _controller(entry, where)
        t = entry.get("t")
        if not isinstance(t, (int, float)) or isinstance(t, bool) or t < 0:
            raise ScriptError(f"{where}: t must be a number >= 0")
        keys = [k for k in ("pose", "buttons", "silence") if k in entry]
        if len(keys) != 1:
            raise ScriptError(f"{where}: exactly one of pose/buttons/silence required")
        kind = keys[0]
        if kind == "pose":
            try:
                pose = pose_from_wire(entry["pose"])
            except Exception as exc:
                raise ScriptError(f"{where}: bad pose: {exc}") from exc
            events.append(ScriptEvent(float(t), cid, pose=pose))
        elif kind == "buttons":
            b = entry["buttons"]
            if not isinstance(b, dict) or not isinstance(b.get("upper"), bool) or not isinstance(b.get("lower"), bool):
                raise ScriptError(f"{where}: buttons must be {{upper: bool, lower: bool}}")
            events.append(ScriptEvent(float(t), cid, buttons=(b["upper"], b["lower"])))
        else:
            dur = entry["silence"]
            if not isinstance(dur, (int, float)) or isinstance(dur, bool) or not dur > 0:
                raise ScriptError(f"{where}: silence duration must be > 0")
            events.append(ScriptEvent(float(t), cid, silence=float(dur)))

    generators = []
    for i, entry in enumerate(doc.get("generators", [])):
        where = f"generators[{i}]"
        cid = _controller(entry, where)
        kind = entry.get("kind")
        if kind not in ("line", "circle", "rotation"):
            raise ScriptError(f"{where}: kind must be line/circle/rotation, got {kind!r}")
        t0 = entry.get("t0", 0.0)
        duration = entry.get("duration")
        if not isinstance(t0, (int, float)) or isinstance(t0, bool) or t0 < 0:
            raise ScriptError(f"{where}: t0 must be a number >= 0")
        if not isinstance(duration, (int, float)) or isinstance(duration, bool) or not duration > 0:
            raise ScriptError(f"{where}: duration must be > 0")
        common = dict(kind=kind, controller_id=cid, t0=float(t0), duration=float(duration))
        if "orientation" in entry:
            common["orientation"] = _quat(entry["orientation"], where)
        if kind == "line":
            gen = Generator(
                start=_vec(entry["from"], where) if "from" in entry else ZERO,
                end=_vec(entry["to"], where) if "to" in entry else ZERO,
                **common,
            )
        elif kind == "circle":
            radius = entry.get("radius")
            if not isinstance(radius, (int, float)) or isinstance(radius, bool) or not radius > 0:
                raise ScriptError(f"{where}: radius must be > 0")
            plane = entry.get("plane", "xy")
            if plane not in _PLANES:
                raise ScriptError(f"{where}: plane must be one of {sorted(_PLANES)}")
            gen = Generator(
                center=_vec(entry.get("center", {"x": 0, "y": 0, "z": 0}), where),
                radius=float(radius),
                plane=plane,
                revolutions=float(entry.get("revolutions", 1.0)),
                **common,
            )
        else:
            angle = entry.get("angle")
            if not isinstance(angle, (int, float)) or isinstance(angle, bool):
                raise ScriptError(f"{where}: angle (radians) required")
            axis = _vec(entry.get("axis", {"x": 0, "y": 0, "z": 1}), where)
            if axis.norm() == 0.0:
                raise ScriptError(f"{where}: rotation axis must be nonzero")
            gen = Generator(
                axis=axis,
                angle=float(angle),
                position=_vec(entry.get("position", {"x": 0, "y": 0, "z": 0}), where),
                **common,
            )
        generators.append(gen)

    # Overlapping segments for one controller would command two poses at once.
    by_controller: dict[str, list[Generator]] = {}
    for gen in generators:
        by_controller.setdefault(gen.controller_id, []).append(gen)
    for cid, gens in by_controller.items():
        gens = sorted(gens, key=lambda g: g.t0)
        for a, b in zip(gens, gens[1:]):
            if b.t0 <= a.t0 + a.duration:
                raise ScriptError(
                    f"overlapping generator segments for controller {cid!r}: "
                    f"[{a.t0}, {a.t0 + a.duration}] and [{b.t0}, {b.t0 + b.duration}]"
                )

    name = doc.get("name", "script")
    if not isinstance(name, str):
        raise ScriptError("name must be a string")
    return Script(name=name, rate=float(rate), events=tuple(events), generators=tuple(generators))


def load_script_file(path: str) -> Script:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScriptError(f"{path}: not valid JSON: {exc}") from exc
    return load_script(doc)


def _sample(gen: Generator, u: float) -> Pose:
    """Pose of a generator at normalized progress u in [0, 1]."""
    if gen.kind == "line":
        position = gen.start + (gen.end - gen.start).scaled(u)
        return Pose(position, gen.orientation)
    if gen.kind == "circle":
        ax1, ax2 = _PLANES[gen.plane]
        theta = 2.0 * math.pi * gen.revolutions * u
        offset = ax1.scaled(gen.radius * math.cos(theta)) + ax2.scaled(gen.radius * math.sin(theta))
        return Pose(gen.center + offset, gen.orientation)
    turned = quat_from_axis_angle(gen.axis, gen.angle * u) if gen.angle * u != 0.0 else IDENTITY_QUAT
    return Pose(gen.position, quat_mul(turned, gen.orientation))


def script_end(script: Script) -> float:
    end = 0.0
    for ev in script.events:
        end = max(end, ev.t + (ev.silence or 0.0))
    for gen in script.generators:
        end = max(end, gen.t0 + gen.duration)
    return end


def expand(script: Script) -> list[tuple[float, WireMessage]]:
    """Deterministic expansion into a timed, sequenced message stream.

    Generators sample at rate spacing with both endpoints included. Idle
    grid ticks are filled with heartbeats so the watchdog only trips inside
    explicit silence windows. Ties sort as (t, controller, pose-first) so a
    button press lands after the pose it should anchor to.
    """
    silences: dict[str, list[tuple[float, float]]] = {}
    for ev in script.events:
        if ev.silence is not None:
            silences.setdefault(ev.controller_id, []).append((ev.t, ev.t + ev.silence))

    def silenced(cid: str, t: float) -> bool:
        return any(start <= t < stop for start, stop in silences.get(cid, ()))

    # (t, controller, kind_rank, payload) before seq assignment
    KIND_POSE, KIND_BUTTONS, KIND_HEARTBEAT = 0, 1, 2
    items: list[tuple[float, str, int, object]] = []
    controllers: set[str] = set()

    for gen in script.generators:
        controllers.add(gen.controller_id)
        steps = int(math.floor(gen.duration * script.rate + 1e-9))
        offsets = [k / script.rate for k in range(steps + 1)]
        if not offsets or offsets[-1] < gen.duration - 1e-9:
            offsets.append(gen.duration)  # land exactly on the segment end
        for t_off in offsets:
            t = gen.t0 + t_off
            u = min(t_off / gen.duration, 1.0)
            if silenced(gen.controller_id, t):
                continue
            items.append((t, gen.controller_id, KIND_POSE, _sample(gen, u)))

    for ev in script.events:
        controllers.add(ev.controller_id)
        if ev.silence is not None:
            continue
        if silenced(ev.controller_id, ev.t):
            continue
        if ev.pose is not None:
            items.append((ev.t, ev.controller_id, KIND_POSE, ev.pose))
        else:
            items.append((ev.t, ev.controller_id, KIND_BUTTONS, ev.buttons))

    # Heartbeat fill: one per grid tick and controller unless some message
    # already landed in the tick interval (t - 1/rate, t].
    end = script_end(script)
    covered: dict[str, set[int]] = {cid: set() for cid in controllers}
    for t, cid, _, _ in items:
        covered[cid].add(math.ceil(t * script.rate - 1e-9))
    for k in range(int(math.floor(end * script.rate + 1e-9)) + 1):
        t = k / script.rate
        for cid in sorted(controllers):
            if k in covered[cid] or silenced(cid, t):
                continue
            items.append((t, cid, KIND_HEARTBEAT, None))

    items.sort(key=lambda item: (item[0], item[1], item[2]))

    seq = {"pose": 0, "buttons": 0, "heartbeat": 0}
    out: list[tuple[float, WireMessage]] = []
    for t, cid, kind, payload in items:
        if kind == KIND_POSE:
            seq["pose"] += 1
            out.append((t, pose_message(seq["pose"], t, cid, payload)))
        elif kind == KIND_BUTTONS:
            seq["buttons"] += 1
            upper, lower = payload
            out.append((t, buttons_message(seq["buttons"], t, cid, upper, lower)))
        else:
            seq["heartbeat"] += 1
            out.append((t, heartbeat_message(seq["heartbeat"], t, cid)))
    return out


def play(
    messages: list[tuple[float, WireMessage]],
    endpoint: tuple[str, int],
    speed: float = 1.0,
    drain: bool = True,
) -> None:
    """Send a timed message stream over TCP, pacing by script time / speed.

    Raises ConnectionError if the daemon is unreachable or drops the
    connection mid-stream. Published messages coming back on the same socket
    are drained in the background so the daemon's writer never stalls.
    """
    if not speed > 0.0:
        raise ValueError(f"speed must be > 0, got {speed}")
    try:
        sock = socket.create_connection(endpoint, timeout=5.0)
    except OSError as exc:
        raise ConnectionError(f"cannot reach daemon at {endpoint[0]}:{endpoint[1]}: {exc}") from exc

    stop = threading.Event()

    def _drain() -> None:
        try:
            while not stop.is_set():
                if not sock.recv(65536):
                    break
        except OSError:
            pass

    reader = threading.Thread(target=_drain, daemon=True)
    if drain:
        reader.start()
    try:
        start = time.monotonic()
        for t, msg in messages:
            delay = start + t / speed - time.monotonic()
            if delay > 0:
                time.sleep(delay)
            try:
                sock.sendall(encode(msg))
            except OSError as exc:
                raise ConnectionError(f"connection lost during playback: {exc}") from exc
    finally:
        stop.set()
        try:
            sock.shutdown(socket.SHUT_WR)
        except OSError:
            pass
        time.sleep(0.05)
        sock.close()
