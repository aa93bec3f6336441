# src/tools/rigid_body.py

import logging
from typing import Tuple

import numpy as np
from scipy.spatial.transform import Rotation

from src.config import settings
from src.models.errors import StepSizeError
from src.models.robot import BodyParams, ContactSet, RobotState, StateDerivative

logger = logging.getLogger(__name__)


def skew(v: np.ndarray) -> np.ndarray:
    """Кососимметричная матрица [v]×: skew(v) @ y == v × y"""
    x, y, z = np.asarray(v, dtype=float).reshape(3)
    return np.array([
        [0.0, -z, y],
        [z, 0.0, -x],
        [-y, x, 0.0],
    ])


def world_inertia(rotation: np.ndarray, params: BodyParams) -> np.ndarray:
    """I_w = R·I·Rᵀ"""
    return rotation @ params.inertia @ rotation.T


def _expmap(theta: np.ndarray) -> np.ndarray:
    return Rotation.from_rotvec(theta).as_matrix()


def _dexpinv(theta: np.ndarray, omega: np.ndarray) -> np.ndarray:
    # Ряд для обратного дифференциала exp, достаточный для четвертого порядка
    first = np.cross(theta, omega)
    return omega - 0.5 * first + np.cross(theta, first) / 12.0


def _polar(rotation: np.ndarray) -> np.ndarray:
    u, _, vt = np.linalg.svd(rotation)
    result = u @ vt
    if np.linalg.det(result) < 0:
        u[:, -1] *= -1.0
        result = u @ vt
    return result


class RigidBodyDynamics:
    """Модель одного твердого тела: ноги безмассовые, силы приложены в точках стоп"""

    @staticmethod
    def skew(v: np.ndarray) -> np.ndarray:
        return skew(v)

    @staticmethod
    def _net_wrench(position: np.ndarray, contacts: ContactSet) -> Tuple[np.ndarray, np.ndarray]:
        """Сумма сил и момент Σ rᵢ × fᵢ, rᵢ = стопа − p"""
        forces = contacts.forces
        lever = contacts.foot_positions - position
        return forces.sum(axis=0), np.cross(lever, forces).sum(axis=0)

    def rigid_body_derivative(self, state: RobotState, params: BodyParams,
                              contacts: ContactSet) -> StateDerivative:
        """Производная состояния в мировой системе

        Args:
            state: текущее состояние корпуса
            params: масса, инерция, гравитация
            contacts: стопы и силы реакции опоры

        Returns:
            StateDerivative: Ṙ = [ω]×R, ṗ, ω̇ = I_w⁻¹(τ − ω×I_w·ω), p̈ = Σf/m − g
        """
        force, torque = self._net_wrench(state.position, contacts)
        omega = state.angular_velocity
        inertia_w = world_inertia(state.rotation, params)
        gyro = np.cross(omega, inertia_w @ omega)

        return StateDerivative(
            rotation_dot=skew(omega) @ state.rotation,
            position_dot=state.linear_velocity.copy(),
            angular_acceleration=np.linalg.solve(inertia_w, torque - gyro),
            linear_acceleration=force / params.mass - params.gravity,
        )

    def integrate_step(self, state: RobotState, params: BodyParams,
                       contacts: ContactSet, dt: float) -> RobotState:
        """Один шаг RK4 на группе вращений

        Поступательная часть и момент импульса L = I_w·ω интегрируются RK4,
        ориентация обновляется экспонентой R⁺ = exp([Θ]×)·R (схема Мунте-Кааса),
        угловая скорость восстанавливается как I_w(R⁺)⁻¹·L⁺.
        """
        if not 0.0 < dt <= settings.MAX_SIM_DT:
            raise StepSizeError(f"Шаг интегрирования {dt} вне (0, {settings.MAX_SIM_DT}]")

        force, _ = self._net_wrench(state.position, contacts)
        acceleration = force / params.mass - params.gravity

        r0 = state.rotation
        p0 = state.position
        v0 = state.linear_velocity
        l0 = world_inertia(r0, params) @ state.angular_velocity

        def stage(theta, p, v, momentum):
            rotation = _expmap(theta) @ r0
            omega = np.linalg.solve(world_inertia(rotation, params), momentum)
            _, torque = self._net_wrench(p, contacts)
            return _dexpinv(theta, omega), v, acceleration, torque

        zero = np.zeros(3)
        k1 = stage(zero, p0, v0, l0)
        k2 = stage(0.5 * dt * k1[0], p0 + 0.5 * dt * k1[1], v0 + 0.5 * dt * k1[2], l0 + 0.5 * dt * k1[3])
        k3 = stage(0.5 * dt * k2[0], p0 + 0.5 * dt * k2[1], v0 + 0.5 * dt * k2[2], l0 + 0.5 * dt * k2[3])
        k4 = stage(dt * k3[0], p0 + dt * k3[1], v0 + dt * k3[2], l0 + dt * k3[3])

        def combine(i):
            return dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])

        rotation = _polar(_expmap(combine(0)) @ r0)
        momentum = l0 + combine(3)
        omega = np.linalg.solve(world_inertia(rotation, params), momentum)

        return RobotState(
            rotation=rotation,
            position=p0 + combine(1),
            angular_velocity=omega,
            linear_velocity=v0 + combine(2),
        )

    @staticmethod
    def total_energy(state: RobotState, params: BodyParams) -> float:
        """Кинетическая + потенциальная энергия корпуса"""
        omega = state.angular_velocity
        kinetic = 0.5 * params.mass * state.linear_velocity @ state.linear_velocity
        kinetic += 0.5 * omega @ world_inertia(state.rotation, params) @ omega
        return float(kinetic + params.mass * params.gravity @ state.position)

    @staticmethod
    def angular_momentum(state: RobotState, params: BodyParams) -> np.ndarray:
        return world_inertia(state.rotation, params) @ state.angular_velocity
