"""Newline-delimited JSON wire protocol and the connection watchdog.

One message per line, UTF-8, compact JSON, terminated by ``\\n``. The same
lines travel over raw TCP and over WebSocket text frames, so any client that
can speak JSON can drive or observe the system.

Field layout (order is part of the format so golden logs diff cleanly):

    {"type":T,"seq":N,"stamp":S,"body":{...}}

    pose      body = {"controller_id", "pose": {"position": {"x","y","z"},
                                       "orientation": {"w","x","y","z"}}}
    buttons   body = {"controller_id", "upper", "lower"}
    heartbeat body = {"controller_id"}
    ee_state  body = {"arm_id", "pose": {...}}
    marker    body = {"arm_id", "pose": {...}}
    gripper   body = {"arm_id", "distance"}
    status    body = {"controller_id", "state", "last_seen"}

Malformed input never kills a connection: a bad line is reported as a typed
error, logged by the caller, and the stream continues with the next line.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

from .se3 import Pose, UnitQuat, Vec3

MESSAGE_TYPES = ("pose", "buttons", "heartbeat", "ee_state", "marker", "gripper", "status")
CONTROLLER_IDS = ("left", "right")
ARM_IDS = ("left", "right")

CONNECTED = "CONNECTED"
DISCONNECTED = "DISCONNECTED"

# Ingested quaternions may carry client-side rounding; renormalize anything
# this close to unit and reject the rest.
QUAT_NORM_TOLERANCE = 1e-6

DEFAULT_TCP_PORT = 10710
DEFAULT_WS_PORT = 10711
DEFAULT_TIMEOUT = 0.5  # ~30 missed frames at the expected 60 Hz input rate


class ProtocolError(Exception):
    """A line that cannot be accepted; drop it, keep the connection."""


class MalformedJson(ProtocolError):
    """Not valid JSON, or the message/body structure is wrong."""


class UnknownType(ProtocolError):
    pass


class InvalidQuaternion(ProtocolError):
    pass


class NonMonotonicSeq(ProtocolError):
    pass


@dataclass(frozen=True)
class WireMessage:
    type: str
    seq: int
    stamp: float
    body: dict


def encode(msg: WireMessage) -> bytes:
    """One UTF-8 JSON line, no embedded newlines, ``\\n``-terminated."""
    obj = {"type": msg.type, "seq": msg.seq, "stamp": msg.stamp, "body": msg.body}
    return (json.dumps(obj, separators=(",", ":"), allow_nan=False) + "\n").encode("utf-8")


def pose_to_wire(pose: Pose) -> dict:
    p, q = pose.position, pose.orientation
    return {
        "position": {"x": p.x, "y": p.y, "z": p.z},
        "orientation": {"w": q.w, "x": q.x, "y": q.y, "z": q.z},
    }


def pose_from_wire(obj: dict) -> Pose:
    """Validated ingest: finite components, near-unit quaternion (renormalized)."""
    position = obj["position"]
    orientation = obj["orientation"]
    v = Vec3(float(position["x"]), float(position["y"]), float(position["z"]))
    if not (math.isfinite(v.x) and math.isfinite(v.y) and math.isfinite(v.z)):
        raise MalformedJson("non-finite position")
    w, x, y, z = (float(orientation[k]) for k in ("w", "x", "y", "z"))
    norm = math.sqrt(w * w + x * x + y * y + z * z)
    if not math.isfinite(norm) or abs(norm - 1.0) > QUAT_NORM_TOLERANCE:
        raise InvalidQuaternion(f"quaternion norm {norm!r} not within {QUAT_NORM_TOLERANCE} of 1")
    return Pose(v, UnitQuat.normalized(w, x, y, z))


def _require(body: dict, key: str, kinds, what: str):
    if key not in body:
        raise MalformedJson(f"{what} missing field {key!r}")
    value = body[key]
    if kinds is bool:
        if not isinstance(value, bool):
            raise MalformedJson(f"{what} field {key!r} must be a boolean")
    elif not isinstance(value, kinds) or isinstance(value, bool):
        raise MalformedJson(f"{what} field {key!r} has wrong type")
    return value


def _validate_body(type_: str, body: dict) -> None:
    if not isinstance(body, dict):
        raise MalformedJson("body must be an object")
    if type_ in ("pose", "buttons", "heartbeat", "status"):
        cid = _require(body, "controller_id", str, type_)
        if cid not in CONTROLLER_IDS:
            raise MalformedJson(f"unknown controller_id {cid!r}")
    if type_ in ("ee_state", "marker", "gripper"):
        aid = _require(body, "arm_id", str, type_)
        if aid not in ARM_IDS:
            raise MalformedJson(f"unknown arm_id {aid!r}")
    if type_ in ("pose", "ee_state", "marker"):
        pose = _require(body, "pose", dict, type_)
        try:
            pose_from_wire(pose)
        except ProtocolError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedJson(f"bad pose payload: {exc}") from exc
    elif type_ == "buttons":
        _require(body, "upper", bool, type_)
        _require(body, "lower", bool, type_)
    elif type_ == "gripper":
        distance = _require(body, "distance", (int, float), type_)
        if not math.isfinite(distance):
            raise MalformedJson("non-finite gripper distance")
    elif type_ == "status":
        state = _require(body, "state", str, type_)
        if state not in (CONNECTED, DISCONNECTED):
            raise MalformedJson(f"unknown status state {state!r}")
        if body.get("last_seen") is not None:
            _require(body, "last_seen", (int, float), type_)


def decode(line: bytes | str) -> WireMessage:
    """Parse and validate one line (stateless; see StreamDecoder for seq checks)."""
    if isinstance(line, bytes):
        try:
            line = line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedJson(f"not UTF-8: {exc}") from exc
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedJson(str(exc)) from exc
    if not isinstance(obj, dict):
        raise MalformedJson("message must be a JSON object")
    type_ = obj.get("type")
    if not isinstance(type_, str):
        raise MalformedJson("missing or non-string type")
    if type_ not in MESSAGE_TYPES:
        raise UnknownType(f"unknown message type {type_!r}")
    seq = obj.get("seq")
    if not isinstance(seq, int) or isinstance(seq, bool):
        raise MalformedJson("seq must be an integer")
    stamp = obj.get("stamp")
    if not isinstance(stamp, (int, float)) or isinstance(stamp, bool) or not math.isfinite(stamp):
        raise MalformedJson("stamp must be a finite number")
    body = obj.get("body")
    _validate_body(type_, body)
    return WireMessage(type_, seq, float(stamp), body)


def body_entity(msg: WireMessage) -> str:
    """The controller or arm a message talks about."""
    return msg.body.get("controller_id") or msg.body.get("arm_id")


class StreamDecoder:
    """Per-connection decoder: stateless validation plus sequence tracking.

    Sequence numbers must strictly increase per (message type, entity) on a
    connection; stale or duplicated messages are rejected so a retransmitting
    client cannot replay old samples into the control loop.
    """

    def __init__(self) -> None:
        self._last_seq: dict[tuple[str, str], int] = {}

    def decode(self, line: bytes | str) -> WireMessage:
        msg = decode(line)
        key = (msg.type, body_entity(msg))
        last = self._last_seq.get(key)
        if last is not None and msg.seq <= last:
            raise NonMonotonicSeq(f"seq {msg.seq} after {last} for {key}")
        self._last_seq[key] = msg.seq
        return msg


# --- message constructors -------------------------------------------------

def pose_message(seq: int, stamp: float, controller_id: str, pose: Pose) -> WireMessage:
    return WireMessage("pose", seq, stamp, {"controller_id": controller_id, "pose": pose_to_wire(pose)})


def buttons_message(seq: int, stamp: float, controller_id: str, upper: bool, lower: bool) -> WireMessage:
    return WireMessage("buttons", seq, stamp, {"controller_id": controller_id, "upper": upper, "lower": lower})


def heartbeat_message(seq: int, stamp: float, controller_id: str) -> WireMessage:
    return WireMessage("heartbeat", seq, stamp, {"controller_id": controller_id})


def ee_state_message(seq: int, stamp: float, arm_id: str, pose: Pose) -> WireMessage:
    return WireMessage("ee_state", seq, stamp, {"arm_id": arm_id, "pose": pose_to_wire(pose)})


def marker_message(seq: int, stamp: float, arm_id: str, pose: Pose) -> WireMessage:
    return WireMessage("marker", seq, stamp, {"arm_id": arm_id, "pose": pose_to_wire(pose)})


def gripper_message(seq: int, stamp: float, arm_id: str, distance: float) -> WireMessage:
    return WireMessage("gripper", seq, stamp, {"arm_id": arm_id, "distance": distance})


def status_message(seq: int, stamp: float, controller_id: str, state: str, last_seen: float | None) -> WireMessage:
    return WireMessage(
        "status", seq, stamp, {"controller_id": controller_id, "state": state, "last_seen": last_seen}
    )


# --- connection watchdog ----------------------------------------------------

@dataclass(frozen=True)
class ConnectionStatus:
    """Liveness of one controller stream. ``last_seen`` is None before the
    first message ever arrives."""

    controller_id: str
    state: str = DISCONNECTED
    last_seen: float | None = None


def mark_seen(status: ConnectionStatus, now: float) -> tuple[ConnectionStatus, str | None]:
    """Refresh on any received message; returns the new state on transition."""
    transition = CONNECTED if status.state == DISCONNECTED else None
    return replace(status, state=CONNECTED, last_seen=now), transition


def watchdog_tick(
    status: ConnectionStatus, now: float, timeout: float = DEFAULT_TIMEOUT
) -> tuple[ConnectionStatus, str | None]:
    """Declare DISCONNECTED once the stream has been silent longer than
    ``timeout``; returns the new state on transition."""
    silent = status.last_seen is None or now - status.last_seen > timeout
    if silent and status.state == CONNECTED:
        return replace(status, state=DISCONNECTED), DISCONNECTED
    return status, None
