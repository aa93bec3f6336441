# src/models/mpc.py

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from src.agent.states import QpStatus
from src.config import settings

# Порядок состояния: Θ[0:3], p[3:6], ω[6:9], ṗ[9:12], гравитация[12]
STATE_DIM = 13
THETA = slice(0, 3)
POS = slice(3, 6)
OMEGA = slice(6, 9)
VEL = slice(9, 12)
GRAVITY_STATE = 12


@dataclass
class LinearModel:
    """Линейная модель корпуса, параметризованная рысканием"""
    a_c: np.ndarray
    b_c: np.ndarray
    yaw: float
    foot_vectors: np.ndarray              # rᵢ = стопа − p, по строке на ногу модели
    leg_indices: Tuple[int, ...]          # какие ноги (FL..RR) дают входы
    a_d: Optional[np.ndarray] = None
    b_d: Optional[np.ndarray] = None
    dt: Optional[float] = None

    @property
    def n_legs(self) -> int:
        return len(self.leg_indices)

    @property
    def n_inputs(self) -> int:
        return 3 * self.n_legs

    @property
    def is_discrete(self) -> bool:
        return self.a_d is not None and self.b_d is not None


@dataclass(frozen=True)
class MpcConfig:
    """Параметры задачи MPC

    Args:
        horizon: число шагов N
        dt: шаг MPC, с
        state_weights: 13 диагональных весов Q
        input_weights: 3 диагональных веса R (fx, fy, fz)
        u_max: верхняя граница вертикальной силы, Н
        f_min: нижняя граница вертикальной силы опорной ноги, Н
        friction: коэффициент трения μ
        state_bounds: необязательные границы (нижняя, верхняя) на 13 состояний
    """
    horizon: int = settings.MPC_HORIZON
    dt: float = settings.MPC_DT
    state_weights: Tuple[float, ...] = settings.MPC_STATE_WEIGHTS
    input_weights: Tuple[float, float, float] = (settings.MPC_INPUT_WEIGHT,) * 3
    u_max: float = settings.MPC_F_MAX
    f_min: float = settings.MPC_F_MIN
    friction: float = settings.MPC_FRICTION
    state_bounds: Optional[Tuple[Tuple[float, ...], Tuple[float, ...]]] = None

    def __post_init__(self):
        if isinstance(self.input_weights, (int, float)):
            object.__setattr__(self, 'input_weights', (float(self.input_weights),) * 3)
        object.__setattr__(self, 'state_weights', tuple(float(w) for w in self.state_weights))
        object.__setattr__(self, 'input_weights', tuple(float(w) for w in self.input_weights))

        if self.horizon < 1:
            raise ValueError(f"Горизонт должен быть >= 1: {self.horizon}")
        if not self.dt > 0:
            raise ValueError(f"Шаг MPC должен быть положительным: {self.dt}")
        if len(self.state_weights) != STATE_DIM or len(self.input_weights) != 3:
            raise ValueError("Нужно 13 весов состояния и 3 веса входа")
        weights = self.state_weights + self.input_weights
        if min(weights) < 0 or max(weights) <= 0:
            raise ValueError("Веса должны быть неотрицательными, хотя бы один положительный")
        if not 0 <= self.f_min < self.u_max:
            raise ValueError(f"Нужно 0 <= f_min < u_max: {self.f_min}, {self.u_max}")
        if not self.friction > 0:
            raise ValueError(f"Коэффициент трения должен быть положительным: {self.friction}")
        if self.state_bounds is not None:
            lower, upper = (np.asarray(b, dtype=float) for b in self.state_bounds)
            if lower.shape != (STATE_DIM,) or upper.shape != (STATE_DIM,) or np.any(lower > upper):
                raise ValueError("Границы состояния: два вектора длины 13, нижняя <= верхней")


@dataclass(frozen=True)
class ReferenceTrajectory:
    """Желаемые состояния x_ref(k), k = 1..N"""
    states: np.ndarray

    def __post_init__(self):
        states = np.array(self.states, dtype=float)
        if states.ndim != 2 or states.shape[1] != STATE_DIM:
            raise ValueError(f"Опорная траектория должна быть N×13, получено {states.shape}")
        if np.any(states[:, GRAVITY_STATE] != 1.0):
            raise ValueError("Гравитационное состояние опорной траектории должно быть равно 1")
        states.setflags(write=False)
        object.__setattr__(self, 'states', states)

    @property
    def horizon(self) -> int:
        return self.states.shape[0]


@dataclass
class QpProblem:
    """min ½UᵀHU + Uᵀg при l <= CU <= u"""
    h: np.ndarray
    g: np.ndarray
    c: np.ndarray
    l: np.ndarray
    u: np.ndarray
    leg_indices: Tuple[int, ...] = ()
    horizon: int = 1

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=float)
        self.g = np.asarray(self.g, dtype=float).reshape(-1)
        n = self.g.size
        self.c = np.asarray(self.c, dtype=float).reshape(-1, n)
        self.l = np.asarray(self.l, dtype=float).reshape(-1)
        self.u = np.asarray(self.u, dtype=float).reshape(-1)

    @property
    def n_vars(self) -> int:
        return self.g.size

    @property
    def n_constraints(self) -> int:
        return self.c.shape[0]

    def objective(self, x: np.ndarray) -> float:
        return float(0.5 * x @ self.h @ x + self.g @ x)


@dataclass
class QpSolution:
    """Результат ADMM: лучшая итерация и ее невязки"""
    x: np.ndarray
    y: np.ndarray
    objective: float
    iterations: int
    status: QpStatus
    primal_residual: float
    dual_residual: float
    z: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def solved(self) -> bool:
        return self.status is QpStatus.SOLVED
