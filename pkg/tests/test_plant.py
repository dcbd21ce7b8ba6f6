import math

import numpy as np
import pytest

from telequest.plant import (
    ArmPlantState,
    PlantLimits,
    clamp_to_workspace,
    default_limits,
    initial_plant,
    set_gripper,
    set_target,
    step,
    validate_limits,
    workspace_center,
)
from telequest.se3 import IDENTITY_QUAT, Pose, Vec3, quat_from_axis_angle, quat_to_axis_angle, quat_mul, quat_inverse

from oracles import random_unit_quat, random_vec
from test_se3 import assert_quat_close, assert_vec_close

CUBE = PlantLimits(workspace_min=Vec3(-0.5, -0.5, 0.0), workspace_max=Vec3(0.5, 0.5, 1.0))


def plant_at(position=Vec3(0.0, 0.0, 0.5), orientation=IDENTITY_QUAT, limits=CUBE):
    state = initial_plant("left", limits)
    return ArmPlantState(
        arm_id=state.arm_id,
        pose=Pose(position, orientation),
        finger_distance=state.finger_distance,
        target=None,
        gripper_target=state.gripper_target,
    )


class TestStepTranslation:
    def test_velocity_limited_move(self):
        state = set_target(plant_at(Vec3(0.0, 0.0, 0.5)), Pose(Vec3(1.0, 0.0, 0.5), IDENTITY_QUAT))
        limits = PlantLimits(CUBE.workspace_min, CUBE.workspace_max, v_max=0.5)
        state = step(state, limits, dt=0.1)
        assert_vec_close(state.pose.position, Vec3(0.05, 0.0, 0.5), tol=1e-12)

    def test_reaches_target_exactly(self):
        target = Pose(Vec3(0.2, 0.1, 0.6), IDENTITY_QUAT)
        state = set_target(plant_at(), target)
        for _ in range(200):
            state = step(state, CUBE, dt=0.02)
        assert state.pose.position == target.position

    def test_out_of_box_target_converges_to_boundary(self):
        state = set_target(plant_at(), Pose(Vec3(5.0, 0.0, 0.5), IDENTITY_QUAT))
        for _ in range(500):
            state = step(state, CUBE, dt=0.02)
            assert state.pose.position.x <= 0.5 + 1e-12
        assert_vec_close(state.pose.position, Vec3(0.5, 0.0, 0.5), tol=1e-12)

    def test_target_stored_verbatim(self):
        wild = Pose(Vec3(100.0, -100.0, 100.0), IDENTITY_QUAT)
        state = set_target(plant_at(), wild)
        assert state.target == wild


class TestStepRotation:
    def test_geodesic_rate_limit(self):
        target = Pose(Vec3(0.0, 0.0, 0.5), quat_from_axis_angle(Vec3(0, 0, 1), math.pi))
        limits = PlantLimits(CUBE.workspace_min, CUBE.workspace_max, omega_max=1.0)
        state = step(set_target(plant_at(), target), limits, dt=0.1)
        # Frozen from the axis-angle oracle: 0.1 rad about z.
        assert_quat_close(
            state.pose.orientation,
            type(IDENTITY_QUAT)(math.cos(0.05), 0.0, 0.0, math.sin(0.05)),
        )

    def test_rotation_converges_exactly(self):
        rng = np.random.default_rng(83)
        target_q = random_unit_quat(rng)
        state = set_target(plant_at(), Pose(Vec3(0.0, 0.0, 0.5), target_q))
        for _ in range(300):
            state = step(state, CUBE, dt=0.02)
        assert state.pose.orientation == target_q

    def test_angle_step_matches_axis_angle_oracle(self):
        rng = np.random.default_rng(89)
        for _ in range(100):
            start_q, target_q = random_unit_quat(rng), random_unit_quat(rng)
            state = set_target(plant_at(orientation=start_q), Pose(Vec3(0.0, 0.0, 0.5), target_q))
            before = state.pose.orientation
            state = step(state, CUBE, dt=0.02)
            after = state.pose.orientation
            moved = quat_mul(after, quat_inverse(before))
            _, moved_angle = quat_to_axis_angle(moved)
            assert moved_angle <= CUBE.omega_max * 0.02 + 1e-12


class TestGripper:
    def test_set_gripper_within_range(self):
        state = set_gripper(plant_at(), 0.0, CUBE)
        assert state.gripper_target == 0.0

    def test_set_gripper_clamped_and_logged(self, caplog):
        with caplog.at_level("WARNING"):
            state = set_gripper(plant_at(), 0.2, CUBE)
        assert state.gripper_target == 0.05
        assert any("clamped" in r.message for r in caplog.records)

    def test_finger_slew_rate(self):
        state = set_gripper(plant_at(), 0.0, CUBE)
        state = step(state, CUBE, dt=0.1)
        assert abs(state.finger_distance - 0.04) < 1e-12  # 0.05 - 0.1 m/s * 0.1 s

    def test_finger_reaches_target(self):
        state = set_gripper(plant_at(), 0.0, CUBE)
        for _ in range(20):
            state = step(state, CUBE, dt=0.1)
        assert state.finger_distance == 0.0


class TestHoldAndInit:
    def test_no_target_is_fixed_point(self):
        state = plant_at(Vec3(0.1, -0.2, 0.7), quat_from_axis_angle(Vec3(1, 1, 0), 0.5))
        assert step(state, CUBE, dt=0.02) == state

    def test_initial_plant_centered(self):
        limits = default_limits("left")
        state = initial_plant("left", limits)
        assert state.pose.position == workspace_center(limits)
        assert state.finger_distance == limits.finger_max
        assert state.target is None

    def test_default_limits_offset_laterally(self):
        left, right = default_limits("left"), default_limits("right")
        assert workspace_center(left).y == pytest.approx(0.3)
        assert workspace_center(right).y == pytest.approx(-0.3)

    def test_bad_dt_rejected(self):
        with pytest.raises(ValueError):
            step(plant_at(), CUBE, dt=0.0)

    def test_validate_limits_names_field(self):
        with pytest.raises(ValueError, match="v_max"):
            validate_limits(PlantLimits(CUBE.workspace_min, CUBE.workspace_max, v_max=0.0))
        with pytest.raises(ValueError, match="workspace"):
            validate_limits(PlantLimits(Vec3(1, 0, 0), Vec3(0, 1, 1)))
        with pytest.raises(ValueError, match="finger"):
            validate_limits(PlantLimits(CUBE.workspace_min, CUBE.workspace_max, finger_min=0.1, finger_max=0.05))


class TestPlantProperties:
    def test_speed_bound_and_containment_random_schedule(self):
        # 10,000 steps with randomized (often unreachable) targets: per-step
        # motion respects v_max/omega_max and the pose never leaves the box.
        rng = np.random.default_rng(97)
        limits = default_limits("right")
        state = initial_plant("right", limits)
        dt = 0.02
        for i in range(10_000):
            if i % 7 == 0:
                target = Pose(random_vec(rng, 3.0), random_unit_quat(rng))
                state = set_target(state, target)
            if i % 11 == 0:
                state = set_gripper(state, float(rng.uniform(-0.05, 0.15)), limits)
            before = state
            state = step(state, limits, dt)
            moved = (state.pose.position - before.pose.position).norm()
            assert moved <= limits.v_max * dt + 1e-12
            _, angle = quat_to_axis_angle(quat_mul(state.pose.orientation, quat_inverse(before.pose.orientation)))
            assert angle <= limits.omega_max * dt + 1e-12
            clamped = clamp_to_workspace(state.pose.position, limits)
            assert state.pose.position == clamped
            assert limits.finger_min <= state.finger_distance <= limits.finger_max
            assert abs(state.finger_distance - before.finger_distance) <= limits.finger_speed * dt + 1e-12

    def test_convergence_step_bound(self):
        # A fixed reachable target is reached within the step budget implied
        # by the rate limits.
        rng = np.random.default_rng(101)
        limits = default_limits("left")
        dt = 0.02
        for _ in range(20):
            state = initial_plant("left", limits)
            target = Pose(
                clamp_to_workspace(random_vec(rng, 1.0), limits),
                random_unit_quat(rng),
            )
            state = set_target(state, target)
            dist = (target.position - state.pose.position).norm()
            _, angle = quat_to_axis_angle(quat_mul(target.orientation, quat_inverse(state.pose.orientation)))
            budget = math.ceil(dist / (limits.v_max * dt)) + math.ceil(angle / (limits.omega_max * dt))
            for _ in range(budget):
                state = step(state, limits, dt)
            assert (state.pose.position - target.position).norm() < 1e-9
            assert_quat_close(state.pose.orientation, target.orientation)
