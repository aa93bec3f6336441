# src/models/hopper.py

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from src.agent.states import HopperPhase
from src.config import settings


@dataclass(frozen=True)
class HopperParams:
    """Параметры плоского прыгуна (значения по умолчанию подобраны вручную)"""
    mass: float = settings.HOPPER_MASS
    inertia: float = settings.HOPPER_INERTIA
    gravity: float = settings.GRAVITY[2]
    leg_damping: float = settings.HOPPER_LEG_DAMPING
    speed_gain: float = settings.HOPPER_SPEED_GAIN
    speed_integral_gain: float = settings.HOPPER_SPEED_INTEGRAL_GAIN
    attitude_kp: float = settings.HOPPER_ATTITUDE_KP
    attitude_kd: float = settings.HOPPER_ATTITUDE_KD
    servo_bandwidth: float = settings.HOPPER_LEG_SERVO_BANDWIDTH
    servos_on: bool = True

    def __post_init__(self):
        if self.mass <= 0 or self.inertia <= 0:
            raise ValueError("Масса и момент инерции прыгуна должны быть положительными")
        if self.leg_damping < 0:
            raise ValueError(f"Демпфирование ноги не может быть отрицательным: {self.leg_damping}")


@dataclass(frozen=True)
class HopperState:
    """Гибридное состояние прыгуна

    Углы отсчитываются против часовой стрелки в плоскости (x вперед, z вверх).
    leg_angle Φ задан относительно оси корпуса, абсолютный угол ноги от вертикали
    равен pitch − Φ, стопа впереди корпуса при положительном абсолютном угле.
    """
    x: float
    z: float
    vx: float
    vz: float
    pitch: float
    pitch_rate: float
    leg_angle: float
    leg_angle_rate: float
    leg_length: float
    phase: HopperPhase = HopperPhase.FLIGHT
    rest_length: float = settings.HOPPER_REST_LENGTH
    spring: float = settings.HOPPER_SPRING
    thrust: float = settings.HOPPER_THRUST
    foot_x: float = 0.0
    time: float = 0.0
    stance_estimate: Optional[float] = None   # T_s для закона скорости
    touchdown_time: float = 0.0
    hop_count: int = 0
    last_apex: float = float('nan')
    speed_integral: float = 0.0               # сумма ошибок скорости по шагам

    def __post_init__(self):
        object.__setattr__(self, 'phase', HopperPhase(self.phase))
        if self.stance_estimate is None:
            # Половина периода пружинного маятника π·√(m/k) при массе по умолчанию
            object.__setattr__(
                self, 'stance_estimate',
                float(np.pi * np.sqrt(settings.HOPPER_MASS / self.spring)))
        if self.phase is HopperPhase.COMPRESSION and self.leg_length > self.rest_length + 1e-9:
            raise ValueError("В фазе сжатия длина ноги не может превышать длину покоя")

    @property
    def absolute_leg_angle(self) -> float:
        return self.pitch - self.leg_angle

    @property
    def foot_height(self) -> float:
        """Высота стопы над землей, в полете не ниже 0 (с демпфированием отрыв бывает при r < r0)"""
        height = float(self.z - self.leg_length * np.cos(self.absolute_leg_angle))
        return max(height, 0.0) if self.in_flight else height

    @property
    def in_flight(self) -> bool:
        return self.phase is HopperPhase.FLIGHT

    @property
    def active_rest_length(self) -> float:
        """Длина покоя пружины с учетом выдвижения в фазе толчка"""
        if self.phase is HopperPhase.THRUST:
            return self.rest_length + self.thrust
        return self.rest_length

    @classmethod
    def dropped(cls, height: float, speed: float = 0.0, params: Optional[HopperParams] = None,
                rest_length: float = settings.HOPPER_REST_LENGTH,
                spring: float = settings.HOPPER_SPRING,
                thrust: float = settings.HOPPER_THRUST) -> 'HopperState':
        """Прыгун в полете: стопа на высоте height над землей, нога вертикальна"""
        mass = (params or HopperParams()).mass
        return cls(
            x=0.0, z=rest_length + height, vx=speed, vz=0.0,
            pitch=0.0, pitch_rate=0.0, leg_angle=0.0, leg_angle_rate=0.0,
            leg_length=rest_length, rest_length=rest_length, spring=spring, thrust=thrust,
            stance_estimate=float(np.pi * np.sqrt(mass / spring)),
        )

    def evolve(self, **changes) -> 'HopperState':
        return replace(self, **changes)
