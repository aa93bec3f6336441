# tests/tools/test_rigid_body.py

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from src.models.errors import StepSizeError
from src.models.robot import BodyParams, ContactSet, RobotState
from src.tools.rigid_body import RigidBodyDynamics, skew, world_inertia


@pytest.fixture
def dynamics():
    return RigidBodyDynamics()


@pytest.fixture
def params():
    return BodyParams.default()


def symmetric_feet(height=0.28):
    return np.array([
        [0.19, 0.111, -height],
        [0.19, -0.111, -height],
        [-0.19, 0.111, -height],
        [-0.19, -0.111, -height],
    ]) + np.array([0.0, 0.0, height])


def test_skew_matches_cross_product():
    rng = np.random.default_rng(0)
    for _ in range(10):
        v, w = rng.normal(size=3), rng.normal(size=3)
        assert np.allclose(skew(v) @ w, np.cross(v, w))


def test_supported_body_has_zero_acceleration(dynamics, params):
    state = RobotState.at_rest()
    weight = params.mass * params.gravity[2]
    forces = np.tile([0.0, 0.0, weight / 4.0], (4, 1))
    contacts = ContactSet(foot_positions=symmetric_feet(), in_contact=[True] * 4, forces=forces)

    derivative = dynamics.rigid_body_derivative(state, params, contacts)

    assert np.allclose(derivative.linear_acceleration, 0.0, atol=1e-12)
    assert np.allclose(derivative.angular_acceleration, 0.0, atol=1e-12)


def test_free_fall_is_exact_parabola(dynamics, params):
    state = RobotState.at_rest(height=1.0).with_velocity(linear=np.array([0.3, -0.1, 2.0]))
    contacts = ContactSet.without_forces(symmetric_feet(), in_contact=[False] * 4)
    dt, steps = 0.005, 200

    for _ in range(steps):
        state = dynamics.integrate_step(state, params, contacts, dt)

    t = dt * steps
    expected = np.array([0.0, 0.0, 1.0]) + np.array([0.3, -0.1, 2.0]) * t - 0.5 * params.gravity * t ** 2
    assert np.allclose(state.position, expected, atol=1e-10)


def test_torque_free_rotation_conserves_momentum_and_energy(dynamics, params):
    state = RobotState.at_rest(height=1.0).with_velocity(angular=np.array([1.0, 0.4, 3.0]))
    contacts = ContactSet.without_forces(symmetric_feet(), in_contact=[False] * 4)
    momentum = dynamics.angular_momentum(state, params)
    rotational = 0.5 * state.angular_velocity @ world_inertia(state.rotation, params) @ state.angular_velocity

    for _ in range(1000):
        state = dynamics.integrate_step(state, params, contacts, 0.001)

    omega = state.angular_velocity
    assert np.allclose(dynamics.angular_momentum(state, params), momentum, atol=1e-10)
    assert abs(0.5 * omega @ world_inertia(state.rotation, params) @ omega - rotational) < 1e-5 * rotational
    assert state.orthonormality_error() < 1e-12
    assert np.linalg.det(state.rotation) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize('dt', [0.0, -0.001, 0.02])
def test_step_size_is_validated(dynamics, params, dt):
    contacts = ContactSet.without_forces(symmetric_feet())
    with pytest.raises(StepSizeError):
        dynamics.integrate_step(RobotState.at_rest(), params, contacts, dt)


def test_swing_leg_cannot_carry_force():
    forces = np.zeros((4, 3))
    forces[1, 2] = 10.0
    with pytest.raises(ValueError):
        ContactSet(foot_positions=symmetric_feet(), in_contact=[True, False, True, True], forces=forces)


def test_principal_axis_spin_is_exact(dynamics, params):
    state = RobotState.at_rest(height=1.0).with_velocity(angular=np.array([0.0, 0.0, 2.0]))
    contacts = ContactSet.without_forces(symmetric_feet(), in_contact=[False] * 4)

    for _ in range(1000):
        state = dynamics.integrate_step(state, params, contacts, 0.001)

    assert np.allclose(state.rotation, Rotation.from_rotvec([0.0, 0.0, 2.0]).as_matrix(), atol=1e-11)
    assert np.allclose(state.angular_velocity, [0.0, 0.0, 2.0], atol=1e-12)


def rotation_after(dynamics, params, contacts, dt, duration=0.2):
    state = RobotState.at_rest().with_velocity(linear=np.array([0.2, -0.1, 0.3]),
                                                angular=np.array([1.0, -0.6, 2.5]))
    for _ in range(int(round(duration / dt))):
        state = dynamics.integrate_step(state, params, contacts, dt)
    return state.rotation


def test_integrator_is_fourth_order(dynamics, params):
    forces = np.array([[5.0, 2.0, 30.0], [-3.0, 1.0, 20.0], [2.0, -4.0, 25.0], [0.0, 3.0, 15.0]])
    contacts = ContactSet(foot_positions=symmetric_feet() + [0.03, -0.02, 0.0], in_contact=[True] * 4,
                          forces=forces)
    reference = rotation_after(dynamics, params, contacts, 0.000625)

    coarse = np.max(np.abs(rotation_after(dynamics, params, contacts, 0.01) - reference))
    fine = np.max(np.abs(rotation_after(dynamics, params, contacts, 0.005) - reference))
    assert 3.5 < np.log2(coarse / fine) < 4.5


def test_total_energy_drift_in_free_flight(dynamics, params):
    state = RobotState.at_rest(height=1.0).with_velocity(linear=np.array([0.5, 0.0, 1.0]),
                                                          angular=np.array([1.0, 0.4, 3.0]))
    contacts = ContactSet.without_forces(symmetric_feet(), in_contact=[False] * 4)
    initial = dynamics.total_energy(state, params)

    for _ in range(10000):
        state = dynamics.integrate_step(state, params, contacts, 0.001)

    assert abs(dynamics.total_energy(state, params) - initial) < 1e-6 * abs(initial)


@pytest.mark.slow
def test_rotation_stays_orthonormal_over_long_runs(dynamics, params):
    state = RobotState.at_rest(height=1.0).with_velocity(angular=np.array([1.0, 0.4, 3.0]))
    contacts = ContactSet.without_forces(symmetric_feet(), in_contact=[False] * 4)

    for _ in range(100000):
        state = dynamics.integrate_step(state, params, contacts, 0.001)

    assert state.orthonormality_error() < 1e-12
    assert np.linalg.det(state.rotation) == pytest.approx(1.0, abs=1e-12)
