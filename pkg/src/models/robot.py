# src/models/robot.py

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.transform import Rotation

from src.config import settings


def _frozen_array(value, shape) -> np.ndarray:
    """Копия массива нужной формы, защищенная от записи"""
    array = np.array(value, dtype=float).reshape(shape)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class RobotState:
    """Состояние модели одного твердого тела (все векторы в мировой системе)"""
    rotation: np.ndarray          # R, мир <- корпус
    position: np.ndarray          # p, м
    angular_velocity: np.ndarray  # ω, рад/с
    linear_velocity: np.ndarray   # ṗ, м/с

    def __post_init__(self):
        object.__setattr__(self, 'rotation', _frozen_array(self.rotation, (3, 3)))
        object.__setattr__(self, 'position', _frozen_array(self.position, (3,)))
        object.__setattr__(self, 'angular_velocity', _frozen_array(self.angular_velocity, (3,)))
        object.__setattr__(self, 'linear_velocity', _frozen_array(self.linear_velocity, (3,)))

    @cached_property
    def euler(self) -> np.ndarray:
        """Углы Θ = (roll, pitch, yaw) в соглашении ZYX"""
        yaw, pitch, roll = Rotation.from_matrix(self.rotation).as_euler('ZYX')
        return np.array([roll, pitch, yaw])

    @property
    def yaw(self) -> float:
        return float(self.euler[2])

    def orthonormality_error(self) -> float:
        """‖RᵀR − I‖∞"""
        return float(np.max(np.abs(self.rotation.T @ self.rotation - np.eye(3))))

    @classmethod
    def at_rest(cls, height: float = settings.NOMINAL_HEIGHT, yaw: float = 0.0,
                position_xy: Sequence[float] = (0.0, 0.0)) -> 'RobotState':
        """Корпус в покое, крен и тангаж нулевые"""
        return cls(
            rotation=Rotation.from_euler('z', yaw).as_matrix(),
            position=[position_xy[0], position_xy[1], height],
            angular_velocity=np.zeros(3),
            linear_velocity=np.zeros(3),
        )

    def with_velocity(self, linear: Optional[np.ndarray] = None,
                      angular: Optional[np.ndarray] = None) -> 'RobotState':
        return replace(
            self,
            linear_velocity=self.linear_velocity if linear is None else linear,
            angular_velocity=self.angular_velocity if angular is None else angular,
        )


@dataclass(frozen=True)
class StateDerivative:
    """Производная состояния по формулам динамики твердого тела"""
    rotation_dot: np.ndarray
    position_dot: np.ndarray
    angular_acceleration: np.ndarray
    linear_acceleration: np.ndarray


@dataclass(frozen=True)
class BodyParams:
    """Параметры корпуса: масса, тензор инерции, гравитация, смещения бедер"""
    mass: float
    inertia: np.ndarray
    gravity: np.ndarray = field(default_factory=lambda: np.array(settings.GRAVITY))
    hip_offsets: np.ndarray = field(default_factory=lambda: np.array(settings.HIP_OFFSETS))

    def __post_init__(self):
        object.__setattr__(self, 'inertia', _frozen_array(self.inertia, (3, 3)))
        object.__setattr__(self, 'gravity', _frozen_array(self.gravity, (3,)))
        object.__setattr__(self, 'hip_offsets', _frozen_array(self.hip_offsets, (4, 3)))

        if not self.mass > 0:
            raise ValueError(f"Масса должна быть положительной: {self.mass}")
        if not np.allclose(self.inertia, self.inertia.T, atol=1e-12):
            raise ValueError("Тензор инерции должен быть симметричным")
        if np.min(np.linalg.eigvalsh(self.inertia)) <= 0:
            raise ValueError("Тензор инерции должен быть положительно определенным")

    @cached_property
    def inertia_inv(self) -> np.ndarray:
        return np.linalg.inv(self.inertia)

    @classmethod
    def default(cls) -> 'BodyParams':
        return cls(mass=settings.BODY_MASS, inertia=np.diag(settings.BODY_INERTIA_DIAG))

    def scaled(self, mass_scale: float = 1.0, inertia_scale: float = 1.0) -> 'BodyParams':
        """Возмущенная копия (например, робот на 15% тяжелее)"""
        return replace(self, mass=self.mass * mass_scale, inertia=self.inertia * inertia_scale)


@dataclass(frozen=True)
class ContactSet:
    """Положения стоп, флаги контакта и силы реакции опоры (мировая система)"""
    foot_positions: np.ndarray
    in_contact: np.ndarray
    forces: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'foot_positions', _frozen_array(self.foot_positions, (4, 3)))
        contact = np.array(self.in_contact, dtype=bool).reshape(4)
        contact.setflags(write=False)
        object.__setattr__(self, 'in_contact', contact)
        object.__setattr__(self, 'forces', _frozen_array(self.forces, (4, 3)))

        # Силы ног в переносе строго нулевые
        if np.any(self.forces[~self.in_contact] != 0.0):
            raise ValueError("Ненулевая сила у ноги без контакта")

    @classmethod
    def without_forces(cls, foot_positions: np.ndarray,
                       in_contact: Sequence[bool] = (True, True, True, True)) -> 'ContactSet':
        return cls(foot_positions=foot_positions, in_contact=in_contact, forces=np.zeros((4, 3)))

    @property
    def contact_legs(self) -> np.ndarray:
        return np.flatnonzero(self.in_contact)
