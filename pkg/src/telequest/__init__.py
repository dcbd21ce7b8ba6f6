"""telequest: bi-manual VR-teleoperation relay with simulated arms.

Controller pose/button streams come in over TCP or WebSocket as
newline-delimited JSON; a relative-motion control law with pause/resume
anchor reset turns them into end-effector targets for two rate-limited
simulated arms; live state, target markers, gripper and connection status
go back out on the same wire.
"""

from .arm_control import (
    ArmConfig,
    ArmControllerState,
    ButtonSnapshot,
    GripperCommand,
    GripperState,
    Paused,
    Resumed,
    TargetPose,
    force_pause,
    handle_buttons,
    handle_pose,
    initial_state,
)
from .plant import (
    ArmPlantState,
    PlantLimits,
    clamp_to_workspace,
    default_limits,
    initial_plant,
    set_gripper,
    set_target,
    step,
)
from .protocol import (
    CONNECTED,
    DISCONNECTED,
    ConnectionStatus,
    InvalidQuaternion,
    MalformedJson,
    NonMonotonicSeq,
    ProtocolError,
    StreamDecoder,
    UnknownType,
    WireMessage,
    decode,
    encode,
    mark_seen,
    watchdog_tick,
)
from .router import (
    ConfigError,
    LockstepClock,
    Router,
    RoutingMode,
    SessionConfig,
    load_config,
    replay,
    route,
)
from .scripts import Script, ScriptError, expand, load_script, load_script_file, play
from .se3 import (
    IDENTITY_POSE,
    IDENTITY_QUAT,
    Pose,
    PoseDelta,
    UnitQuat,
    Vec3,
    apply_delta,
    quat_from_axis_angle,
    quat_inverse,
    quat_mul,
    quat_rotate,
    quat_to_axis_angle,
    relative_delta,
)

__version__ = "0.1.0"
