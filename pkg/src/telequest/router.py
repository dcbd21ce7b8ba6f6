"""Session router: the deterministic core of the relay daemon.

Wires the two controller streams onto the two arm state machines according
to the routing mode, steps the simulated plants, enforces the connection
watchdog and produces the outbound message stream. All state lives here and
is mutated only by :meth:`Router.tick`, which the daemon calls from a single
control-loop context; transports just feed :meth:`Router.ingest` and fan the
returned messages out to clients.

Time is an explicit parameter. The daemon passes wall-clock seconds in live
mode; in lockstep mode the clock is derived from message stamps, which makes
an entire session a pure function of its input stream (the basis of the
golden-log regression tests).
"""

from __future__ import annotations

import enum
import json
import logging
from collections import deque
from dataclasses import dataclass, replace

from . import arm_control, plant
from .arm_control import ArmConfig, ButtonSnapshot
from .plant import PlantLimits, default_limits, validate_limits
from .protocol import (
    CONNECTED,
    DEFAULT_TCP_PORT,
    DEFAULT_TIMEOUT,
    DEFAULT_WS_PORT,
    DISCONNECTED,
    ConnectionStatus,
    WireMessage,
    ee_state_message,
    gripper_message,
    mark_seen,
    marker_message,
    pose_from_wire,
    status_message,
    watchdog_tick,
)
from .se3 import IDENTITY_QUAT, UnitQuat, Vec3, quat_from_axis_angle

logger = logging.getLogger(__name__)

ARM_IDS = ("left", "right")
CONTROLLER_IDS = ("left", "right")


class RoutingMode(enum.Enum):
    SIDE_BY_SIDE = "side-by-side"
    MIRROR = "mirror"


def route(mode: RoutingMode, controller_id: str) -> str:
    """Controller-to-arm mapping. Mirror mode swaps hands, nothing else."""
    if controller_id not in CONTROLLER_IDS:
        raise ValueError(f"unknown controller_id {controller_id!r}")
    if mode is RoutingMode.SIDE_BY_SIDE:
        return controller_id
    return "right" if controller_id == "left" else "left"


def controller_for_arm(mode: RoutingMode, arm_id: str) -> str:
    # The mapping is an involution, so routing backwards is the same swap.
    return route(mode, arm_id)


class ConfigError(ValueError):
    """Invalid session configuration; the message names the offending field."""


@dataclass(frozen=True)
class SessionConfig:
    mode: RoutingMode = RoutingMode.SIDE_BY_SIDE
    gain: float = 1.0
    alignment: UnitQuat = IDENTITY_QUAT
    left_limits: PlantLimits = default_limits("left")
    right_limits: PlantLimits = default_limits("right")
    tcp_port: int = DEFAULT_TCP_PORT
    ws_port: int = DEFAULT_WS_PORT
    timeout: float = DEFAULT_TIMEOUT
    loop_rate: float = 50.0
    publish_rate: float = 25.0
    lockstep: bool = False

    def arm_limits(self, arm_id: str) -> PlantLimits:
        return self.left_limits if arm_id == "left" else self.right_limits


def validate_config(config: SessionConfig) -> SessionConfig:
    if not isinstance(config.mode, RoutingMode):
        raise ConfigError(f"mode must be side-by-side or mirror, got {config.mode!r}")
    if not config.gain > 0:
        raise ConfigError(f"gain must be > 0, got {config.gain}")
    if not config.timeout > 0:
        raise ConfigError(f"timeout must be > 0, got {config.timeout}")
    for name in ("loop_rate", "publish_rate"):
        if not getattr(config, name) > 0:
            raise ConfigError(f"{name} must be > 0, got {getattr(config, name)}")
    for name in ("tcp_port", "ws_port"):
        port = getattr(config, name)
        # 0 requests an OS-assigned ephemeral port
        if not isinstance(port, int) or not 0 <= port < 65536:
            raise ConfigError(f"{name} must be a port number, got {port!r}")
    if config.tcp_port == config.ws_port and config.tcp_port != 0:
        raise ConfigError(f"tcp_port and ws_port must be distinct, both are {config.tcp_port}")
    try:
        validate_limits(config.left_limits, "arms.left")
        validate_limits(config.right_limits, "arms.right")
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return config


# --- configuration documents -------------------------------------------------

def _vec_doc(v: Vec3) -> dict:
    return {"x": v.x, "y": v.y, "z": v.z}


def _limits_doc(limits: PlantLimits) -> dict:
    return {
        "v_max": limits.v_max,
        "omega_max": limits.omega_max,
        "finger_speed": limits.finger_speed,
        "finger_min": limits.finger_min,
        "finger_max": limits.finger_max,
        "workspace": {"min": _vec_doc(limits.workspace_min), "max": _vec_doc(limits.workspace_max)},
    }


def config_doc(config: SessionConfig = SessionConfig()) -> dict:
    """The JSON form of a configuration, defaults included (print-config)."""
    return {
        "mode": config.mode.value,
        "gain": config.gain,
        "alignment": {
            "w": config.alignment.w,
            "x": config.alignment.x,
            "y": config.alignment.y,
            "z": config.alignment.z,
        },
        "tcp_port": config.tcp_port,
        "ws_port": config.ws_port,
        "timeout": config.timeout,
        "loop_rate": config.loop_rate,
        "publish_rate": config.publish_rate,
        "lockstep": config.lockstep,
        "arms": {"left": _limits_doc(config.left_limits), "right": _limits_doc(config.right_limits)},
    }


def _parse_vec(doc, where: str) -> Vec3:
    try:
        return Vec3(float(doc["x"]), float(doc["y"]), float(doc["z"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: expected {{x,y,z}} numbers") from exc


def _parse_limits(doc, base: PlantLimits, where: str) -> PlantLimits:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where} must be an object")
    unknown = set(doc) - {"v_max", "omega_max", "finger_speed", "finger_min", "finger_max", "workspace"}
    if unknown:
        raise ConfigError(f"{where}: unknown field {sorted(unknown)[0]!r}")
    updates = {}
    for name in ("v_max", "omega_max", "finger_speed", "finger_min", "finger_max"):
        if name in doc:
            value = doc[name]
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"{where}.{name} must be a number")
            updates[name] = float(value)
    if "workspace" in doc:
        ws = doc["workspace"]
        if not isinstance(ws, dict) or "min" not in ws or "max" not in ws:
            raise ConfigError(f"{where}.workspace must have min and max")
        updates["workspace_min"] = _parse_vec(ws["min"], f"{where}.workspace.min")
        updates["workspace_max"] = _parse_vec(ws["max"], f"{where}.workspace.max")
    return replace(base, **updates)


_MODE_NAMES = {
    "side-by-side": RoutingMode.SIDE_BY_SIDE,
    "mirror": RoutingMode.MIRROR,
}

# Convenience preset: mirror routing plus a half-turn yaw alignment for an
# operator standing face-on to the robot.
MIRROR_FACING = "mirror-facing"
_YAW_180 = quat_from_axis_angle(Vec3(0.0, 0.0, 1.0), 3.141592653589793)


def load_config(path: str | None = None, overrides: dict | None = None) -> SessionConfig:
    """Defaults, then config file, then explicit overrides (CLI flags)."""
    doc: dict = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config file must contain a JSON object")
    for key, value in (overrides or {}).items():
        if value is not None:
            doc[key] = value

    known = {
        "mode", "gain", "alignment", "tcp_port", "ws_port",
        "timeout", "loop_rate", "publish_rate", "lockstep", "arms",
    }
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown config field {sorted(unknown)[0]!r}")

    config = SessionConfig()
    if "mode" in doc:
        mode_name = doc["mode"]
        if mode_name == MIRROR_FACING:
            config = replace(config, mode=RoutingMode.MIRROR, alignment=_YAW_180)
        elif mode_name in _MODE_NAMES:
            config = replace(config, mode=_MODE_NAMES[mode_name])
        else:
            raise ConfigError(
                f"mode must be one of {sorted(_MODE_NAMES)} or {MIRROR_FACING!r}, got {mode_name!r}"
            )
    if "alignment" in doc:
        a = doc["alignment"]
        try:
            config = replace(
                config,
                alignment=UnitQuat.normalized(float(a["w"]), float(a["x"]), float(a["y"]), float(a["z"])),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"alignment: expected a unit quaternion {{w,x,y,z}}: {exc}") from exc
    for name in ("gain", "timeout", "loop_rate", "publish_rate"):
        if name in doc:
            value = doc[name]
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"{name} must be a number, got {value!r}")
            config = replace(config, **{name: float(value)})
    for name in ("tcp_port", "ws_port"):
        if name in doc:
            value = doc[name]
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(f"{name} must be an integer, got {value!r}")
            config = replace(config, **{name: value})
    if "lockstep" in doc:
        if not isinstance(doc["lockstep"], bool):
            raise ConfigError(f"lockstep must be a boolean, got {doc['lockstep']!r}")
        config = replace(config, lockstep=doc["lockstep"])
    if "arms" in doc:
        arms = doc["arms"]
        if not isinstance(arms, dict) or set(arms) - {"left", "right"}:
            raise ConfigError("arms must be an object with only left/right entries")
        if "left" in arms:
            config = replace(config, left_limits=_parse_limits(arms["left"], config.left_limits, "arms.left"))
        if "right" in arms:
            config = replace(config, right_limits=_parse_limits(arms["right"], config.right_limits, "arms.right"))

    return validate_config(config)


# --- the router itself -------------------------------------------------------

@dataclass(frozen=True)
class RouterEvent:
    """Structured record of one state transition, for logs and tests."""

    t: float
    kind: str  # "pause" | "resume" | "gripper" | "connection"
    subject: str  # arm_id or controller_id
    detail: str = ""


class Router:
    """Single-threaded session state; see module docstring for the contract."""

    def __init__(self, config: SessionConfig):
        validate_config(config)
        self.config = config
        self.arms = {
            arm_id: arm_control.initial_state(
                ArmConfig(
                    gain=config.gain,
                    alignment=config.alignment,
                    finger_min=config.arm_limits(arm_id).finger_min,
                    finger_max=config.arm_limits(arm_id).finger_max,
                )
            )
            for arm_id in ARM_IDS
        }
        self.plants = {
            arm_id: plant.initial_plant(arm_id, config.arm_limits(arm_id)) for arm_id in ARM_IDS
        }
        self.status = {cid: ConnectionStatus(cid) for cid in CONTROLLER_IDS}
        self.last_controller_pose = {}
        self.events: list[RouterEvent] = []
        self._queue: deque[tuple[float, WireMessage]] = deque()
        self._seq: dict[tuple[str, str], int] = {}
        self._next_publish = 0.0

    # -- inputs ---------------------------------------------------------

    def ingest(self, msg: WireMessage, arrival_time: float) -> None:
        """Queue one decoded inbound message; processed by the next tick."""
        self._queue.append((arrival_time, msg))

    # -- outputs --------------------------------------------------------

    def drain_events(self) -> list[RouterEvent]:
        events, self.events = self.events, []
        return events

    def _emit(self, kind: str, subject: str, t: float, detail: str = "") -> None:
        event = RouterEvent(t, kind, subject, detail)
        self.events.append(event)
        logger.info("%s %s t=%.3f %s", kind, subject, t, detail)

    def _next_seq(self, type_: str, entity: str) -> int:
        # Sequence numbers count per (type, entity) so the two arms' streams
        # are symmetric: swapping routing modes relabels arm_id and nothing
        # else in the published bytes.
        key = (type_, entity)
        self._seq[key] = self._seq.get(key, 0) + 1
        return self._seq[key]

    def _status_message(self, cid: str, now: float) -> WireMessage:
        status = self.status[cid]
        return status_message(self._next_seq("status", cid), now, cid, status.state, status.last_seen)

    # -- the control loop -----------------------------------------------

    def tick(self, now: float) -> list[WireMessage]:
        """One control-loop step: drain, watchdog, step plants, publish."""
        published: list[WireMessage] = []

        while self._queue and self._queue[0][0] <= now:
            arrival, msg = self._queue.popleft()
            self._process(msg, arrival, now, published)

        for cid in CONTROLLER_IDS:
            self.status[cid], transition = watchdog_tick(self.status[cid], now, self.config.timeout)
            if transition == DISCONNECTED:
                self._emit("connection", cid, now, DISCONNECTED)
                published.append(self._status_message(cid, now))
                arm_id = route(self.config.mode, cid)
                self.arms[arm_id], paused = arm_control.force_pause(self.arms[arm_id])
                if paused is not None:
                    self.plants[arm_id] = plant.clear_target(self.plants[arm_id])
                    self._emit("pause", arm_id, now, "watchdog")

        dt = 1.0 / self.config.loop_rate
        for arm_id in ARM_IDS:
            self.plants[arm_id] = plant.step(self.plants[arm_id], self.config.arm_limits(arm_id), dt)

        if now + 1e-9 >= self._next_publish:
            period = 1.0 / self.config.publish_rate
            while self._next_publish <= now + 1e-9:
                self._next_publish += period
            published.extend(self._publish_frame(now))

        return published

    def _publish_frame(self, now: float) -> list[WireMessage]:
        frame: list[WireMessage] = []
        for arm_id in ARM_IDS:
            arm = self.arms[arm_id]
            body = self.plants[arm_id]
            frame.append(ee_state_message(self._next_seq("ee_state", arm_id), now, arm_id, body.pose))
            # Marker: the live target while streaming, the actual pose while
            # paused (and right after a resume, before the first sample).
            marker = arm.last_target if arm.streaming and arm.last_target is not None else body.pose
            frame.append(marker_message(self._next_seq("marker", arm_id), now, arm_id, marker))
            frame.append(
                gripper_message(self._next_seq("gripper", arm_id), now, arm_id, body.finger_distance)
            )
        for cid in CONTROLLER_IDS:
            frame.append(self._status_message(cid, now))
        return frame

    def _process(self, msg: WireMessage, arrival: float, now: float, published: list[WireMessage]) -> None:
        if msg.type not in ("pose", "buttons", "heartbeat"):
            logger.warning("dropping outbound-only message type %r from client", msg.type)
            return
        cid = msg.body["controller_id"]
        self.status[cid], transition = mark_seen(self.status[cid], arrival)
        if transition == CONNECTED:
            self._emit("connection", cid, now, CONNECTED)
            published.append(self._status_message(cid, now))

        arm_id = route(self.config.mode, cid)
        if msg.type == "pose":
            pose = pose_from_wire(msg.body["pose"])
            self.last_controller_pose[cid] = pose
            self.arms[arm_id], event = arm_control.handle_pose(
                self.arms[arm_id], pose, self.plants[arm_id].pose
            )
            if event is not None:
                self.plants[arm_id] = plant.set_target(self.plants[arm_id], event.pose)
        elif msg.type == "buttons":
            controller_pose = self.last_controller_pose.get(cid)
            if controller_pose is None:
                logger.warning(
                    "buttons from %s before any pose sample; press ignored", cid
                )
                return
            snapshot = ButtonSnapshot(upper=msg.body["upper"], lower=msg.body["lower"])
            self.arms[arm_id], events = arm_control.handle_buttons(
                self.arms[arm_id], snapshot, self.plants[arm_id].pose, controller_pose
            )
            for event in events:
                if isinstance(event, arm_control.Resumed):
                    self.plants[arm_id] = plant.clear_target(self.plants[arm_id])
                    self._emit("resume", arm_id, now)
                elif isinstance(event, arm_control.Paused):
                    self.plants[arm_id] = plant.clear_target(self.plants[arm_id])
                    self._emit("pause", arm_id, now, "button")
                elif isinstance(event, arm_control.GripperCommand):
                    self.plants[arm_id] = plant.set_gripper(
                        self.plants[arm_id], event.distance, self.config.arm_limits(arm_id)
                    )
                    self._emit("gripper", arm_id, now, f"{event.distance:.4f}")
        # heartbeat: liveness only, already handled by mark_seen


class LockstepClock:
    """Derives control-loop ticks from inbound message stamps.

    Every tick advances virtual time by exactly one loop period; a message
    with stamp s first drives all ticks due at or before s, then joins the
    queue for the following tick. A session becomes a pure function of the
    message stream.
    """

    def __init__(self, router: Router):
        self.router = router
        self.dt = 1.0 / router.config.loop_rate
        self._ticks = 0

    @property
    def now(self) -> float:
        return self._ticks * self.dt

    def advance_to(self, stamp: float) -> list[WireMessage]:
        published: list[WireMessage] = []
        while (self._ticks + 1) * self.dt <= stamp + 1e-9:
            self._ticks += 1
            published.extend(self.router.tick(self.now))
        return published

    def feed(self, msg: WireMessage) -> list[WireMessage]:
        published = self.advance_to(msg.stamp)
        self.router.ingest(msg, msg.stamp)
        return published

    def flush(self, extra: float = 0.0) -> list[WireMessage]:
        """Run out the clock to the latest queued stamp plus ``extra``."""
        horizon = self.now + extra
        for arrival, _ in self.router._queue:
            horizon = max(horizon, arrival)
        published = self.advance_to(horizon)
        self._ticks += 1
        published.extend(self.router.tick(self.now))
        return published


def replay(
    messages: list[tuple[float, WireMessage]], config: SessionConfig, settle: float = 0.0
) -> tuple[list[WireMessage], list[RouterEvent]]:
    """Deterministically run a timed message stream through a fresh router."""
    router = Router(config)
    clock = LockstepClock(router)
    published: list[WireMessage] = []
    for _, msg in messages:
        published.extend(clock.feed(msg))
    published.extend(clock.flush(settle))
    return published, router.drain_events()
