# src/models/control.py

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.agent.states import GaitName, LegMode
from src.config import settings


@dataclass(frozen=True)
class GaitSchedule:
    """Походка: период цикла, фазовые сдвиги ног и коэффициент опоры"""
    name: GaitName
    period: float
    offsets: Tuple[float, float, float, float]
    duty: float

    def __post_init__(self):
        object.__setattr__(self, 'name', GaitName(self.name))
        object.__setattr__(self, 'offsets', tuple(float(o) for o in self.offsets))

        if not self.period > 0:
            raise ValueError(f"Период походки должен быть положительным: {self.period}")
        if len(self.offsets) != 4 or any(not 0.0 <= o < 1.0 for o in self.offsets):
            raise ValueError(f"Нужно 4 фазовых сдвига в [0, 1): {self.offsets}")
        if not 0.0 < self.duty <= 1.0:
            raise ValueError(f"Коэффициент опоры должен быть в (0, 1]: {self.duty}")

    @property
    def stance_duration(self) -> float:
        """T_s = d·T_cycle"""
        return self.duty * self.period

    @property
    def swing_duration(self) -> float:
        return (1.0 - self.duty) * self.period

    @classmethod
    def from_name(cls, name: str, period: Optional[float] = None,
                  duty: Optional[float] = None) -> 'GaitSchedule':
        """Походка из встроенной библиотеки с возможной заменой периода и опоры"""
        gait = GaitName(name)
        preset = settings.GAITS[gait.value]
        return cls(
            name=gait,
            period=preset['period'] if period is None else period,
            offsets=preset['offsets'],
            duty=preset['duty'] if duty is None else duty,
        )


@dataclass(frozen=True)
class VirtualLegGroup:
    """Группа ног, работающих как одна виртуальная нога"""
    members: Tuple[int, ...]
    phase: float
    equal_force: bool = True


@dataclass(frozen=True)
class LegKinematics:
    """Конфигурация ноги с тремя степенями свободы (abad, hip, knee)

    side = +1 для левых ног (FL, RL), -1 для правых.
    """
    q: np.ndarray
    qd: np.ndarray = field(default_factory=lambda: np.zeros(3))
    side: float = 1.0
    abad_link: float = settings.ABAD_LINK
    upper_link: float = settings.UPPER_LINK
    lower_link: float = settings.LOWER_LINK
    knee_limits: Tuple[float, float] = settings.KNEE_LIMITS

    def __post_init__(self):
        object.__setattr__(self, 'q', np.array(self.q, dtype=float).reshape(3))
        object.__setattr__(self, 'qd', np.array(self.qd, dtype=float).reshape(3))
        if self.side not in (1.0, -1.0):
            raise ValueError(f"side должен быть +1 или -1: {self.side}")

    def knee_within_limits(self) -> bool:
        low, high = self.knee_limits
        return low <= self.q[2] <= high

    @classmethod
    def for_leg(cls, leg: int, q, qd=None) -> 'LegKinematics':
        side = 1.0 if leg in (0, 2) else -1.0
        return cls(q=q, qd=np.zeros(3) if qd is None else qd, side=side)


@dataclass(frozen=True)
class LegCommand:
    """Команда ноге: режим, моменты в суставах и цель стопы в переносе"""
    leg: int
    mode: LegMode
    torques: np.ndarray
    foot_target: Optional[np.ndarray] = None
    foot_target_velocity: Optional[np.ndarray] = None


@dataclass(frozen=True)
class TwistCommand:
    """Желаемая скорость корпуса: vx, vy в системе рыскания и скорость рыскания"""
    vx: float = 0.0
    vy: float = 0.0
    yaw_rate: float = 0.0

    def world_velocity(self, yaw: float) -> np.ndarray:
        c, s = np.cos(yaw), np.sin(yaw)
        return np.array([c * self.vx - s * self.vy, s * self.vx + c * self.vy, 0.0])


@dataclass
class ControlOutput:
    """Результат одного тика контроллера"""
    commands: List[LegCommand]
    forces: np.ndarray
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def status(self) -> str:
        return self.diagnostics.get('status', 'success')

    def torque_vector(self) -> np.ndarray:
        return np.concatenate([command.torques for command in self.commands])


@dataclass(frozen=True)
class FootFeedback:
    """Положения и скорости стоп в мировой системе (истинные, от симулятора)"""
    positions: np.ndarray
    velocities: np.ndarray = field(default_factory=lambda: np.zeros((4, 3)))

    def __post_init__(self):
        object.__setattr__(self, 'positions', np.array(self.positions, dtype=float).reshape(4, 3))
        object.__setattr__(self, 'velocities', np.array(self.velocities, dtype=float).reshape(4, 3))
