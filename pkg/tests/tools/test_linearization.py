# tests/tools/test_linearization.py

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from src.models.errors import NoContactError, StepSizeError
from src.models.mpc import GRAVITY_STATE, OMEGA, POS, STATE_DIM, THETA, VEL
from src.models.robot import BodyParams, ContactSet, RobotState
from src.tools.linearization import Linearizer, yaw_rotation
from src.tools.rigid_body import RigidBodyDynamics


@pytest.fixture
def linearizer():
    return Linearizer()


@pytest.fixture
def params():
    return BodyParams.default()


def random_feet(rng, com):
    feet = np.array([[0.19, 0.11, 0.0], [0.19, -0.11, 0.0], [-0.19, 0.11, 0.0], [-0.19, -0.11, 0.0]])
    feet[:, :2] += rng.uniform(-0.05, 0.05, size=(4, 2)) + com[:2]
    return feet


def test_input_matrix_matches_finite_differences(linearizer, params):
    rng = np.random.default_rng(1)
    dynamics = RigidBodyDynamics()
    eps = 1e-3

    for _ in range(50):
        yaw = rng.uniform(-np.pi, np.pi)
        state = RobotState.at_rest(height=0.28, yaw=yaw, position_xy=rng.uniform(-1, 1, size=2))
        feet = random_feet(rng, state.position)
        nominal = np.tile([0.0, 0.0, params.mass * params.gravity[2] / 4.0], (4, 1))
        model = linearizer.build_continuous(params, yaw, ContactSet.without_forces(feet),
                                            com=state.position)

        for column in range(12):
            plus, minus = nominal.copy(), nominal.copy()
            plus.reshape(-1)[column] += eps
            minus.reshape(-1)[column] -= eps
            d_plus = dynamics.rigid_body_derivative(state, params, ContactSet(feet, [True] * 4, plus))
            d_minus = dynamics.rigid_body_derivative(state, params, ContactSet(feet, [True] * 4, minus))

            fd_omega = (d_plus.angular_acceleration - d_minus.angular_acceleration) / (2 * eps)
            fd_velocity = (d_plus.linear_acceleration - d_minus.linear_acceleration) / (2 * eps)
            assert np.allclose(model.b_c[OMEGA, column], fd_omega, atol=1e-5)
            assert np.allclose(model.b_c[VEL, column], fd_velocity, atol=1e-5)
            assert np.allclose(model.b_c[THETA, column], 0.0)
            assert np.allclose(model.b_c[POS, column], 0.0)


def test_state_matrix_blocks(linearizer, params):
    feet = ContactSet.without_forces(np.zeros((4, 3)))
    model = linearizer.build_continuous(params, 0.3, feet)

    assert np.allclose(model.a_c[THETA, OMEGA], yaw_rotation(0.3))
    assert np.allclose(model.a_c[POS, VEL], np.eye(3))
    assert np.allclose(model.a_c[VEL, GRAVITY_STATE], -params.gravity)
    assert np.allclose(model.a_c[GRAVITY_STATE], 0.0)


def test_only_contact_legs_give_inputs(linearizer, params):
    feet = ContactSet.without_forces(np.zeros((4, 3)), in_contact=[True, False, False, True])
    model = linearizer.build_continuous(params, 0.0, feet)
    assert model.leg_indices == (0, 3)
    assert model.b_c.shape == (STATE_DIM, 6)

    everything = linearizer.build_continuous(params, 0.0, feet, all_legs=True)
    assert everything.leg_indices == (0, 1, 2, 3)


def test_no_contact_is_rejected(linearizer, params):
    feet = ContactSet.without_forces(np.zeros((4, 3)), in_contact=[False] * 4)
    with pytest.raises(NoContactError):
        linearizer.build_continuous(params, 0.0, feet)


@pytest.mark.parametrize('dt', [0.0, 0.2])
def test_discretization_step_is_validated(linearizer, params, dt):
    model = linearizer.build_continuous(params, 0.0, ContactSet.without_forces(np.zeros((4, 3))))
    with pytest.raises(StepSizeError):
        linearizer.discretize(model, dt)


def rk4_linear(a, b, x, u, dt, substeps):
    h = dt / substeps
    f = lambda v: a @ v + b @ u  # noqa: E731
    for _ in range(substeps):
        k1 = f(x)
        k2 = f(x + 0.5 * h * k1)
        k3 = f(x + 0.5 * h * k2)
        k4 = f(x + h * k3)
        x = x + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return x


@pytest.mark.parametrize('dt', [0.001, 0.01, 0.025])
def test_zero_order_hold_matches_fine_integration(linearizer, params, dt):
    rng = np.random.default_rng(2)
    for _ in range(20):
        yaw = rng.uniform(-np.pi, np.pi)
        feet = ContactSet.without_forces(rng.uniform(-0.3, 0.3, size=(4, 3)))
        model = linearizer.linearize(params, yaw, feet, dt)

        x0 = rng.normal(size=STATE_DIM)
        x0[GRAVITY_STATE] = 1.0
        u = rng.normal(scale=20.0, size=12)

        expected = rk4_linear(model.a_c, model.b_c, x0, u, dt, substeps=200)
        assert np.allclose(model.a_d @ x0 + model.b_d @ u, expected, atol=1e-8)
        assert model.dt == dt


def test_discretization_composes_over_steps(linearizer, params):
    rng = np.random.default_rng(3)
    model = linearizer.build_continuous(params, 0.7, ContactSet.without_forces(random_feet(rng, np.zeros(3))),
                                        com=np.array([0.0, 0.0, 0.28]))
    first = linearizer.discretize(model, 0.01)
    second = linearizer.discretize(model, 0.015)
    whole = linearizer.discretize(model, 0.025)

    assert np.allclose(whole.a_d, second.a_d @ first.a_d, atol=1e-12)
    assert np.allclose(whole.b_d, second.a_d @ first.b_d + second.b_d, atol=1e-12)


def angular_mismatch(linearizer, params, feet, forces, tilt, yaw=0.4):
    rotation = Rotation.from_euler('ZYX', [yaw, tilt, -tilt]).as_matrix()
    state = RobotState(rotation=rotation, position=np.array([0.0, 0.0, 0.28]),
                       angular_velocity=np.array([tilt, -tilt, 0.5 * tilt]), linear_velocity=np.zeros(3))
    model = linearizer.build_continuous(params, yaw, ContactSet.without_forces(feet), com=state.position)
    exact = RigidBodyDynamics().rigid_body_derivative(state, params, ContactSet(feet, [True] * 4, forces))

    linear = model.b_c @ forces.reshape(-1)
    assert np.allclose(linear[VEL] - params.gravity, exact.linear_acceleration, atol=1e-12)
    return float(np.max(np.abs(linear[OMEGA] - exact.angular_acceleration)))


def test_model_agrees_with_nonlinear_dynamics_to_first_order(linearizer, params):
    rng = np.random.default_rng(4)
    feet = random_feet(rng, np.zeros(3)) + [0.04, -0.03, 0.0]
    forces = np.tile([0.0, 0.0, params.mass * params.gravity[2] / 4.0], (4, 1)) + rng.normal(scale=3.0, size=(4, 3))

    assert angular_mismatch(linearizer, params, feet, forces, 0.0) < 1e-9
    coarse = angular_mismatch(linearizer, params, feet, forces, 1e-2)
    fine = angular_mismatch(linearizer, params, feet, forces, 1e-3)
    assert fine < 0.2 * coarse


def test_quarter_turn_yaw_swaps_inertia_axes(linearizer, params):
    feet = np.array([[0.19, 0.11, -0.28], [0.19, -0.11, -0.28], [-0.19, 0.11, -0.28], [-0.19, -0.11, -0.28]])
    model = linearizer.build_continuous(params, np.pi / 2, ContactSet.without_forces(feet))

    assert np.allclose(model.a_c[THETA, OMEGA], [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
                       atol=1e-15)
    ixx, iyy, izz = np.diag(params.inertia)
    swapped = np.linalg.inv(np.diag([iyy, ixx, izz]))
    lever = feet[0]
    skew = np.array([[0.0, -lever[2], lever[1]], [lever[2], 0.0, -lever[0]], [-lever[1], lever[0], 0.0]])
    assert np.allclose(model.b_c[OMEGA, 0:3], swapped @ skew, atol=1e-12)
