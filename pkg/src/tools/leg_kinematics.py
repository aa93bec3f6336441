# src/tools/leg_kinematics.py

import logging
from typing import Dict, Optional

import numpy as np

from src.models.control import LegKinematics
from src.models.errors import SingularLegError
from src.models.robot import RobotState

logger = logging.getLogger(__name__)

SINGULARITY_TOL = 1e-6


def to_hip_frame(state: RobotState, hip_offset: np.ndarray, point: np.ndarray,
                 velocity: np.ndarray) -> Dict[str, np.ndarray]:
    """Положение и относительная скорость точки в системе бедра (оси корпуса)"""
    lever = np.asarray(point, dtype=float) - state.position
    relative = np.asarray(velocity, dtype=float) - state.linear_velocity - np.cross(state.angular_velocity, lever)
    return {
        'position': state.rotation.T @ lever - hip_offset,
        'velocity': state.rotation.T @ relative,
    }


def _gain_matrix(gain) -> np.ndarray:
    gain = np.asarray(gain, dtype=float)
    if gain.ndim == 0:
        return gain * np.eye(3)
    if gain.ndim == 1:
        return np.diag(gain)
    return gain


class LegKinematicsSolver:
    """Кинематика ноги abad / hip / knee в системе бедра (оси корпуса)

    abad вращает вокруг +x, hip и knee качают звенья вперед при положительном угле.
    При q = 0 нога вертикальна, стопа в (0, side·L, −(l_верх + l_ниж)).
    """

    def forward(self, kin: LegKinematics) -> np.ndarray:
        q0, q1, q2 = kin.q
        s1, c1 = np.sin(q0), np.cos(q0)
        side_offset = kin.side * kin.abad_link
        reach = kin.upper_link * np.cos(q1) + kin.lower_link * np.cos(q1 + q2)
        forward = kin.upper_link * np.sin(q1) + kin.lower_link * np.sin(q1 + q2)
        return np.array([
            forward,
            side_offset * c1 + reach * s1,
            side_offset * s1 - reach * c1,
        ])

    def jacobian(self, kin: LegKinematics) -> np.ndarray:
        q0, q1, q2 = kin.q
        s1, c1 = np.sin(q0), np.cos(q0)
        s23, c23 = np.sin(q1 + q2), np.cos(q1 + q2)
        upper, lower = kin.upper_link, kin.lower_link
        side_offset = kin.side * kin.abad_link

        reach = upper * np.cos(q1) + lower * c23
        forward = upper * np.sin(q1) + lower * s23

        return np.array([
            [0.0, reach, lower * c23],
            [-side_offset * s1 + reach * c1, -forward * s1, -lower * s23 * s1],
            [side_offset * c1 + reach * s1, forward * c1, lower * s23 * c1],
        ])

    def determinant(self, kin: LegKinematics) -> float:
        return float(np.linalg.det(self.jacobian(kin)))

    def _checked_jacobian(self, kin: LegKinematics, leg: Optional[int]) -> np.ndarray:
        jacobian = self.jacobian(kin)
        det_j = float(np.linalg.det(jacobian))
        if abs(det_j) <= SINGULARITY_TOL:
            raise SingularLegError(det_j, leg)
        return jacobian

    def inverse(self, foot: np.ndarray, side: float, template: Optional[LegKinematics] = None) -> LegKinematics:
        """Аналитическая обратная задача, колено вперед, колено ограничено пределами

        Args:
            foot: положение стопы в системе бедра
            side: +1 левая нога, −1 правая
            template: источник длин звеньев и пределов

        Returns:
            LegKinematics: углы суставов (скорости нулевые)
        """
        base = template or LegKinematics(q=np.zeros(3), side=side)
        x, y, z = np.asarray(foot, dtype=float)
        upper, lower, offset = base.upper_link, base.lower_link, base.abad_link

        reach = np.sqrt(max(y * y + z * z - offset * offset, 0.0))
        q0 = np.arctan2(z, y) + np.arctan2(reach, offset * side)

        cos_knee = (x * x + reach * reach - upper ** 2 - lower ** 2) / (2.0 * upper * lower)
        q2 = -np.arccos(np.clip(cos_knee, -1.0, 1.0))
        q2 = float(np.clip(q2, *base.knee_limits))
        q1 = np.arctan2(x, reach) - np.arctan2(lower * np.sin(q2), upper + lower * np.cos(q2))

        q0 = np.arctan2(np.sin(q0), np.cos(q0))
        return LegKinematics(
            q=np.array([q0, q1, q2]), qd=np.zeros(3), side=side,
            abad_link=offset, upper_link=upper, lower_link=lower, knee_limits=base.knee_limits,
        )

    def with_foot_velocity(self, kin: LegKinematics, foot_velocity: np.ndarray,
                           leg: Optional[int] = None) -> LegKinematics:
        """Скорости суставов q̇ = J⁻¹·v"""
        jacobian = self._checked_jacobian(kin, leg)
        qd = np.linalg.solve(jacobian, np.asarray(foot_velocity, dtype=float))
        return LegKinematics(q=kin.q, qd=qd, side=kin.side, abad_link=kin.abad_link,
                             upper_link=kin.upper_link, lower_link=kin.lower_link,
                             knee_limits=kin.knee_limits)

    def impedance_torques(self, kin: LegKinematics, p_des: np.ndarray, v_des: np.ndarray,
                          kp, kd, leg: Optional[int] = None) -> np.ndarray:
        """τ = Jᵀ·(Kp·(p_des − p(q)) + Kd·(v_des − J·q̇))"""
        jacobian = self._checked_jacobian(kin, leg)
        position = self.forward(kin)
        velocity = jacobian @ kin.qd
        force = _gain_matrix(kp) @ (np.asarray(p_des) - position) + \
            _gain_matrix(kd) @ (np.asarray(v_des) - velocity)
        return jacobian.T @ force

    def stance_torques(self, kin: LegKinematics, rotation: np.ndarray, f_world: np.ndarray,
                       leg: Optional[int] = None) -> np.ndarray:
        """τ = Jᵀ·Rᵀ·(−f): стопа давит на землю силой −f, земля действует на корпус силой +f"""
        jacobian = self._checked_jacobian(kin, leg)
        return jacobian.T @ (rotation.T @ -np.asarray(f_world, dtype=float))
