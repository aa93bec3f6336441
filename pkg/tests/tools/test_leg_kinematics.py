# tests/tools/test_leg_kinematics.py

import numpy as np
import pytest

from src.models.control import LegKinematics
from src.models.errors import SingularLegError
from src.models.robot import RobotState
from src.tools.leg_kinematics import LegKinematicsSolver, to_hip_frame


@pytest.fixture
def solver():
    return LegKinematicsSolver()


def random_configuration(rng, side):
    q = np.array([rng.uniform(-0.4, 0.4), rng.uniform(-0.8, 0.8), rng.uniform(-2.4, -0.4)])
    return LegKinematics(q=q, qd=rng.normal(size=3), side=side)


def test_zero_configuration_points_down(solver):
    foot = solver.forward(LegKinematics(q=np.zeros(3), side=1.0))
    assert foot == pytest.approx([0.0, 0.062, -0.404])


@pytest.mark.parametrize('side', [1.0, -1.0])
def test_jacobian_matches_finite_differences(solver, side):
    rng = np.random.default_rng(8)
    eps = 1e-6
    for _ in range(20):
        kin = random_configuration(rng, side)
        numeric = np.zeros((3, 3))
        for j in range(3):
            dq = np.zeros(3)
            dq[j] = eps
            plus = solver.forward(LegKinematics(q=kin.q + dq, side=side))
            minus = solver.forward(LegKinematics(q=kin.q - dq, side=side))
            numeric[:, j] = (plus - minus) / (2 * eps)
        assert np.allclose(solver.jacobian(kin), numeric, atol=1e-8)


@pytest.mark.parametrize('side', [1.0, -1.0])
def test_inverse_recovers_forward(solver, side):
    rng = np.random.default_rng(9)
    for _ in range(20):
        kin = random_configuration(rng, side)
        foot = solver.forward(kin)
        recovered = solver.inverse(foot, side)
        assert np.allclose(solver.forward(recovered), foot, atol=1e-9)
        assert recovered.knee_within_limits()


def test_inverse_clamps_knee_when_unreachable(solver):
    kin = solver.inverse(np.array([0.0, 0.062, -0.6]), 1.0)
    assert kin.q[2] == pytest.approx(-0.1)


def test_joint_velocities_reproduce_foot_velocity(solver):
    rng = np.random.default_rng(10)
    kin = random_configuration(rng, 1.0)
    velocity = np.array([0.3, -0.2, 0.5])
    moving = solver.with_foot_velocity(kin, velocity, leg=0)
    assert np.allclose(solver.jacobian(moving) @ moving.qd, velocity)


def test_stance_torques_satisfy_virtual_work(solver):
    rng = np.random.default_rng(11)
    rotation = RobotState.at_rest(yaw=0.7).rotation
    for _ in range(10):
        kin = random_configuration(rng, -1.0)
        force = np.array([rng.normal(), rng.normal(), 40.0])
        torques = solver.stance_torques(kin, rotation, force, leg=1)
        foot_velocity = solver.jacobian(kin) @ kin.qd
        assert torques @ kin.qd == pytest.approx((rotation.T @ -force) @ foot_velocity)


def test_supporting_force_extends_knee(solver):
    kin = solver.inverse(np.array([0.0, 0.062, -0.28]), 1.0)
    torques = solver.stance_torques(kin, np.eye(3), np.array([0.0, 0.0, 22.0]))
    assert torques[2] > 0.0


def test_impedance_pulls_toward_target(solver):
    kin = solver.inverse(np.array([0.0, 0.062, -0.28]), 1.0)
    target = np.array([0.05, 0.062, -0.25])
    torques = solver.impedance_torques(kin, target, np.zeros(3), 700.0, 20.0)
    force = np.linalg.solve(solver.jacobian(kin).T, torques)
    assert force == pytest.approx(700.0 * (target - solver.forward(kin)))


def test_singular_leg_raises(solver):
    straight = LegKinematics(q=np.array([0.0, 0.0, 0.0]), side=1.0)
    with pytest.raises(SingularLegError) as error:
        solver.stance_torques(straight, np.eye(3), np.array([0.0, 0.0, 20.0]), leg=2)
    assert error.value.leg == 2
    assert abs(error.value.det_j) < 1e-6


def test_to_hip_frame_removes_body_motion():
    state = RobotState.at_rest(height=0.3, yaw=np.pi / 2).with_velocity(
        linear=np.array([0.5, 0.0, 0.0]), angular=np.array([0.0, 0.0, 1.0]))
    hip = np.array([0.19, 0.049, 0.0])
    point = state.position + state.rotation @ (hip + np.array([0.0, 0.06, -0.28]))
    velocity = state.linear_velocity + np.cross(state.angular_velocity, point - state.position)

    local = to_hip_frame(state, hip, point, velocity)
    assert local['position'] == pytest.approx([0.0, 0.06, -0.28])
    assert np.allclose(local['velocity'], 0.0)
