import math

import numpy as np
import pytest

from telequest.se3 import (
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

from oracles import as_array, quat_matrix, random_pose, random_unit_quat, random_vec

Z_AXIS = Vec3(0.0, 0.0, 1.0)
X_AXIS = Vec3(1.0, 0.0, 0.0)


def assert_quat_close(a: UnitQuat, b: UnitQuat, tol: float = 1e-9):
    assert abs(a.w - b.w) < tol and abs(a.x - b.x) < tol
    assert abs(a.y - b.y) < tol and abs(a.z - b.z) < tol


def assert_vec_close(a: Vec3, b: Vec3, tol: float = 1e-9):
    assert abs(a.x - b.x) < tol and abs(a.y - b.y) < tol and abs(a.z - b.z) < tol


class TestQuatMul:
    def test_identity(self):
        q = quat_from_axis_angle(Vec3(1.0, 2.0, -0.5), 0.7)
        assert quat_mul(IDENTITY_QUAT, q) == q

    def test_angle_addition_about_common_axis(self):
        qz90 = quat_from_axis_angle(Z_AXIS, math.pi / 2)
        qz180 = quat_mul(qz90, qz90)
        assert_quat_close(qz180, UnitQuat(0.0, 0.0, 0.0, 1.0))

    def test_matches_matrix_product(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            a, b = random_unit_quat(rng), random_unit_quat(rng)
            got = quat_matrix(quat_mul(a, b))
            want = quat_matrix(a) @ quat_matrix(b)
            assert np.max(np.abs(got - want)) < 1e-9


class TestQuatInverse:
    def test_identity(self):
        assert quat_inverse(IDENTITY_QUAT) == IDENTITY_QUAT

    def test_single_axis(self):
        qx90 = quat_from_axis_angle(X_AXIS, math.pi / 2)
        qx_neg90 = quat_from_axis_angle(X_AXIS, -math.pi / 2)
        assert_quat_close(quat_inverse(qx90), qx_neg90)

    def test_matches_matrix_transpose(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            q = random_unit_quat(rng)
            got = quat_matrix(quat_inverse(q))
            assert np.max(np.abs(got - quat_matrix(q).T)) < 1e-9

    def test_mul_inverse_is_identity(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            q = random_unit_quat(rng)
            assert_quat_close(quat_mul(q, quat_inverse(q)), IDENTITY_QUAT)


class TestQuatRotate:
    def test_identity(self):
        v = Vec3(1.0, 2.0, 3.0)
        assert quat_rotate(IDENTITY_QUAT, v) == v

    def test_quarter_turn_about_z(self):
        qz90 = quat_from_axis_angle(Z_AXIS, math.pi / 2)
        assert_vec_close(quat_rotate(qz90, X_AXIS), Vec3(0.0, 1.0, 0.0))

    def test_matches_matrix_vector_product(self):
        rng = np.random.default_rng(13)
        for _ in range(1000):
            q, v = random_unit_quat(rng), random_vec(rng, 5.0)
            got = as_array(quat_rotate(q, v))
            want = quat_matrix(q) @ as_array(v)
            assert np.max(np.abs(got - want)) < 1e-9

    def test_preserves_norm(self):
        rng = np.random.default_rng(17)
        for _ in range(500):
            q, v = random_unit_quat(rng), random_vec(rng, 10.0)
            assert abs(quat_rotate(q, v).norm() - v.norm()) < 1e-9


class TestCanonicalForm:
    def test_every_producing_op_is_canonical_unit(self):
        rng = np.random.default_rng(23)
        for _ in range(1000):
            a, b = random_unit_quat(rng), random_unit_quat(rng)
            for q in (quat_mul(a, b), quat_inverse(a), quat_from_axis_angle(random_vec(rng), rng.uniform(-7, 7))):
                assert abs(q.norm() - 1.0) < 1e-9
                assert q.w >= 0.0

    def test_normalized_rescales(self):
        q = UnitQuat.normalized(2.0, 0.0, 0.0, 0.0)
        assert q == IDENTITY_QUAT

    def test_normalized_flips_sign(self):
        q = UnitQuat.normalized(-1.0, 0.0, 0.0, 0.0)
        assert q == IDENTITY_QUAT

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            UnitQuat.normalized(0.0, 0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            UnitQuat.normalized(float("nan"), 0.0, 0.0, 0.0)


class TestAxisAngle:
    def test_round_trip(self):
        rng = np.random.default_rng(29)
        for _ in range(500):
            q = random_unit_quat(rng)
            axis, angle = quat_to_axis_angle(q)
            assert 0.0 <= angle <= math.pi + 1e-12
            assert_quat_close(quat_from_axis_angle(axis, angle), q)

    def test_identity_angle_zero(self):
        _, angle = quat_to_axis_angle(IDENTITY_QUAT)
        assert angle == 0.0

    def test_zero_axis_rejected(self):
        with pytest.raises(ValueError):
            quat_from_axis_angle(Vec3(0.0, 0.0, 0.0), 1.0)


class TestRelativeDelta:
    def test_no_motion_gives_zero_delta(self):
        rng = np.random.default_rng(31)
        p = random_pose(rng)
        d = relative_delta(p, p)
        assert_vec_close(d.translation, Vec3(0.0, 0.0, 0.0))
        assert_quat_close(d.rotation, IDENTITY_QUAT)

    def test_pure_translation(self):
        q = random_unit_quat(np.random.default_rng(37))
        anchor = Pose(Vec3(1.0, 1.0, 1.0), q)
        current = Pose(Vec3(1.2, 1.0, 1.0), q)
        d = relative_delta(anchor, current)
        assert_vec_close(d.translation, Vec3(0.2, 0.0, 0.0))
        assert_quat_close(d.rotation, IDENTITY_QUAT)

    def test_anchor_orientation_does_not_rotate_delta(self):
        # World-frame convention: the anchor being twisted 90 degrees about z
        # must not turn a +x displacement into a +y delta.
        anchor = Pose(Vec3(0.5, -0.2, 0.3), quat_from_axis_angle(Z_AXIS, math.pi / 2))
        current = Pose(anchor.position + Vec3(0.1, 0.0, 0.0), anchor.orientation)
        d = relative_delta(anchor, current)
        assert_vec_close(d.translation, Vec3(0.1, 0.0, 0.0), tol=1e-12)

    def test_alignment_conjugates_rotation(self):
        rng = np.random.default_rng(41)
        for _ in range(200):
            anchor, current = random_pose(rng), random_pose(rng)
            alignment = random_unit_quat(rng)
            d = relative_delta(anchor, current, alignment)
            A = quat_matrix(alignment)
            world = quat_matrix(current.orientation) @ quat_matrix(anchor.orientation).T
            assert np.max(np.abs(quat_matrix(d.rotation) - A @ world @ A.T)) < 1e-9
            want_t = A @ (as_array(current.position) - as_array(anchor.position))
            assert np.max(np.abs(as_array(d.translation) - want_t)) < 1e-9


class TestApplyDelta:
    def test_zero_delta_is_identity(self):
        rng = np.random.default_rng(43)
        p = random_pose(rng)
        assert apply_delta(p, PoseDelta(Vec3(0.0, 0.0, 0.0), IDENTITY_QUAT), 1.0) == p

    def test_double_displacement_doubles_target_offset(self):
        # Moving the hand twice as far moves the target twice as far, exactly.
        rng = np.random.default_rng(47)
        ee = random_pose(rng)
        d = Vec3(0.11, -0.05, 0.02)
        once = apply_delta(ee, PoseDelta(d, IDENTITY_QUAT), 1.0)
        twice = apply_delta(ee, PoseDelta(d.scaled(2.0), IDENTITY_QUAT), 1.0)
        assert_vec_close(twice.position - ee.position, (once.position - ee.position).scaled(2.0), tol=1e-12)

    def test_rotation_composes_in_world_frame(self):
        ee = Pose(Vec3(0.0, 0.0, 0.0), quat_from_axis_angle(X_AXIS, math.pi / 2))
        delta = PoseDelta(Vec3(0.0, 0.0, 0.0), quat_from_axis_angle(Z_AXIS, math.pi / 2))
        got = apply_delta(ee, delta, 1.0)
        # Frozen from the rotation-matrix oracle: Rz(90) @ Rx(90).
        assert_quat_close(got.orientation, UnitQuat(0.5, 0.5, 0.5, 0.5))

    def test_gain_scales_translation_only(self):
        ee = Pose(Vec3(1.0, 0.0, 0.0), IDENTITY_QUAT)
        delta = PoseDelta(Vec3(0.1, 0.0, 0.0), quat_from_axis_angle(Z_AXIS, 0.3))
        got = apply_delta(ee, delta, 2.0)
        assert_vec_close(got.position, Vec3(1.2, 0.0, 0.0), tol=1e-12)
        assert_quat_close(got.orientation, delta.rotation)


class TestControlLawProperties:
    def test_start_pose_independence(self):
        # Identical world-frame motions measured from two different anchors
        # produce identical deltas, hence identical targets.
        rng = np.random.default_rng(53)
        for _ in range(100):
            a1, a2 = random_pose(rng), random_pose(rng)
            alignment = random_unit_quat(rng)
            ee = random_pose(rng)
            for _ in range(10):
                shift = random_vec(rng, 0.5)
                turn = random_unit_quat(rng)
                c1 = Pose(a1.position + shift, quat_mul(turn, a1.orientation))
                c2 = Pose(a2.position + shift, quat_mul(turn, a2.orientation))
                t1 = apply_delta(ee, relative_delta(a1, c1, alignment), 1.0)
                t2 = apply_delta(ee, relative_delta(a2, c2, alignment), 1.0)
                assert_vec_close(t1.position, t2.position)
                assert_quat_close(t1.orientation, t2.orientation)

    def test_composition_consistency(self):
        # apply_delta(P, relative_delta(P, C)) reproduces C.
        rng = np.random.default_rng(59)
        for _ in range(200):
            p, c = random_pose(rng), random_pose(rng)
            got = apply_delta(p, relative_delta(p, c), 1.0)
            assert_vec_close(got.position, c.position)
            assert_quat_close(got.orientation, c.orientation)
