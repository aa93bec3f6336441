# src/tools/foot_planner.py

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from src.config import settings
from src.models.errors import PhaseRangeError

logger = logging.getLogger(__name__)


def _cubic_bezier(p0, p1, p2, p3, s):
    """Значение, первая и вторая производные кубической кривой Безье по параметру"""
    u = 1.0 - s
    value = u ** 3 * p0 + 3 * u ** 2 * s * p1 + 3 * u * s ** 2 * p2 + s ** 3 * p3
    first = 3 * u ** 2 * (p1 - p0) + 6 * u * s * (p2 - p1) + 3 * s ** 2 * (p3 - p2)
    second = 6 * u * (p2 - 2 * p1 + p0) + 6 * s * (p3 - 2 * p2 + p1)
    return value, first, second


class FootPlanner:
    """Точка постановки по Райберту и траектория переноса стопы"""

    def raibert_foot_placement(self, velocity: np.ndarray, velocity_ref: np.ndarray,
                               stance_duration: float, gain: float, hip_world: np.ndarray,
                               ground_height: float = 0.0) -> np.ndarray:
        """x_f = ẋ·T_s/2 + k_ẋ·(ẋ − ẋ_ref) по каждой горизонтальной оси

        Args:
            velocity: горизонтальная скорость корпуса (2)
            velocity_ref: желаемая горизонтальная скорость (2)
            stance_duration: T_s, с
            gain: k_ẋ, с
            hip_world: положение бедра в мире (проекция на землю - база точки)
            ground_height: высота земли в точке постановки

        Returns:
            np.ndarray: точка постановки в мире (3)
        """
        if not stance_duration > 0:
            raise ValueError(f"Длительность опоры должна быть положительной: {stance_duration}")

        velocity = np.asarray(velocity, dtype=float)[:2]
        velocity_ref = np.asarray(velocity_ref, dtype=float)[:2]
        offset = velocity * stance_duration / 2.0 + gain * (velocity - velocity_ref)

        hip = np.asarray(hip_world, dtype=float)
        return np.array([hip[0] + offset[0], hip[1] + offset[1], ground_height])

    def swing_trajectory(self, start: np.ndarray, foothold: np.ndarray, apex_height: float,
                         phase: float, swing_duration: float = 1.0
                         ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Составная кривая Безье переноса

        По горизонтали - кубическая кривая с нулевыми скоростями на концах,
        по вертикали - две кубические половины с вершиной ground + apex_height при s = 0.5,
        где ground = max(z начала, z конца). Производные по времени при swing_duration.
        """
        if not 0.0 <= phase <= 1.0:
            raise PhaseRangeError(f"Фаза переноса {phase} вне [0, 1]")

        start = np.asarray(start, dtype=float)
        foothold = np.asarray(foothold, dtype=float)

        # Повторенные контрольные точки дают нулевую скорость на концах
        position, velocity, acceleration = _cubic_bezier(start, start, foothold, foothold, phase)
        velocity = velocity / swing_duration
        acceleration = acceleration / swing_duration ** 2

        apex = max(start[2], foothold[2]) + apex_height
        if phase < 0.5:
            z0, z1, local = start[2], apex, 2.0 * phase
        else:
            z0, z1, local = apex, foothold[2], 2.0 * phase - 1.0
        z, dz, ddz = _cubic_bezier(z0, z0, z1, z1, local)

        position[2] = z
        velocity[2] = 2.0 * dz / swing_duration
        acceleration[2] = 4.0 * ddz / swing_duration ** 2
        return position, velocity, acceleration

    @staticmethod
    def shoulder_points(position: np.ndarray, rotation: np.ndarray, hip_offsets: np.ndarray,
                        abad_link: float = settings.ABAD_LINK) -> np.ndarray:
        """Точки над стопами при вертикальных ногах: бедро + боковой вынос abad (мир, 4×3)"""
        sides = np.array([1.0, -1.0, 1.0, -1.0])
        local = np.asarray(hip_offsets, dtype=float).copy()
        local[:, 1] += sides * abad_link
        return np.asarray(position, dtype=float) + local @ np.asarray(rotation).T

    def nominal_footholds(self, position: np.ndarray, rotation: np.ndarray, hip_offsets: np.ndarray,
                          ground_height: float = 0.0) -> np.ndarray:
        """Стопы на земле под точками плеч"""
        feet = self.shoulder_points(position, rotation, hip_offsets)
        feet[:, 2] = ground_height
        return feet

    @staticmethod
    def ground_height(table: Optional[Sequence[float]], step: int) -> float:
        """Высота опоры для step-го шага ноги; за концом таблицы - последнее значение"""
        if not table:
            return 0.0
        return float(table[min(step, len(table) - 1)])
