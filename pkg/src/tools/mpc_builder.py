# src/tools/mpc_builder.py

import logging
from typing import Tuple

import numpy as np

from src.config import settings
from src.models.control import TwistCommand
from src.models.errors import DimensionError
from src.models.mpc import (
    GRAVITY_STATE, OMEGA, POS, STATE_DIM, THETA, VEL,
    LinearModel, MpcConfig, QpProblem, ReferenceTrajectory,
)
from src.models.robot import RobotState

logger = logging.getLogger(__name__)

ROWS_PER_LEG = 5


def friction_rows(mu: float, f_min: float, u_max: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Пирамида трения одной опорной ноги

    Returns:
        (C, l, u): 5×3 блок и границы строк
            f_min <= f_z <= u_max
            f_x − μf_z <= 0,  f_x + μf_z >= 0
            f_y − μf_z <= 0,  f_y + μf_z >= 0
    """
    if not mu > 0:
        raise ValueError(f"Коэффициент трения должен быть положительным: {mu}")

    block = np.array([
        [0.0, 0.0, 1.0],
        [1.0, 0.0, -mu],
        [1.0, 0.0, mu],
        [0.0, 1.0, -mu],
        [0.0, 1.0, mu],
    ])
    lower = np.array([f_min, -np.inf, 0.0, -np.inf, 0.0])
    upper = np.array([u_max, 0.0, np.inf, 0.0, np.inf])
    return block, lower, upper


def state_vector(state: RobotState) -> np.ndarray:
    """x0 = (Θ, p, ω, ṗ, 1)"""
    x0 = np.zeros(STATE_DIM)
    x0[THETA] = state.euler
    x0[POS] = state.position
    x0[OMEGA] = state.angular_velocity
    x0[VEL] = state.linear_velocity
    x0[GRAVITY_STATE] = 1.0
    return x0


class ReferenceGenerator:
    """Опорная траектория постоянной команды скорости"""

    def __init__(self, height: float = settings.NOMINAL_HEIGHT):
        self.height = height

    def generate(self, state: RobotState, twist: TwistCommand, horizon: int,
                 dt: float) -> ReferenceTrajectory:
        """Рыскание интегрирует скорость рыскания, позиция - повернутую скорость

        Крен и тангаж нулевые, высота номинальная.
        """
        states = np.zeros((horizon, STATE_DIM))
        yaw = state.yaw
        position = np.array([state.position[0], state.position[1], self.height])

        for k in range(horizon):
            yaw += twist.yaw_rate * dt
            velocity = twist.world_velocity(yaw)
            position = position + velocity * dt
            states[k, THETA] = (0.0, 0.0, yaw)
            states[k, POS] = position
            states[k, OMEGA] = (0.0, 0.0, twist.yaw_rate)
            states[k, VEL] = velocity
            states[k, GRAVITY_STATE] = 1.0

        return ReferenceTrajectory(states=states)


class MpcBuilder:
    """Сборка задачи MPC и конденсация в плотную QP"""

    def condensed_dynamics(self, model: LinearModel, horizon: int) -> Tuple[np.ndarray, np.ndarray]:
        """Aqp (13N×13) и Bqp (13N×mN): x(k+1) = A^(k+1)·x0 + Σ A^(k−j)·B·u(j)"""
        a_d, b_d = model.a_d, model.b_d
        n_in = b_d.shape[1]

        powers = [np.eye(STATE_DIM)]
        for _ in range(horizon):
            powers.append(a_d @ powers[-1])

        a_qp = np.vstack(powers[1:])
        b_qp = np.zeros((STATE_DIM * horizon, n_in * horizon))
        for k in range(horizon):
            for j in range(k + 1):
                b_qp[STATE_DIM * k:STATE_DIM * (k + 1), n_in * j:n_in * (j + 1)] = powers[k - j] @ b_d
        return a_qp, b_qp

    def build_mpc(self, model: LinearModel, schedule: np.ndarray, ref: ReferenceTrajectory,
                  cfg: MpcConfig, x0: np.ndarray) -> QpProblem:
        """Конденсированная QP по горизонту

        Args:
            model: дискретная модель с шагом cfg.dt
            schedule: таблица контактов N×4 (True - опора)
            ref: опорная траектория x_ref(1..N)
            cfg: веса и ограничения
            x0: текущее состояние (13)

        Returns:
            QpProblem: H = 2(BqpᵀQ̄Bqp + R̄), g = 2BqpᵀQ̄(Aqp·x0 − x̄_ref) и строки l <= CU <= u
        """
        horizon = cfg.horizon
        schedule = np.asarray(schedule, dtype=bool)

        if not model.is_discrete:
            raise DimensionError("Модель не дискретизована")
        if model.dt is not None and not np.isclose(model.dt, cfg.dt):
            raise DimensionError(f"Шаг модели {model.dt} не совпадает с шагом MPC {cfg.dt}")
        if schedule.ndim != 2 or schedule.shape[1] != 4 or schedule.shape[0] < horizon:
            raise DimensionError(f"Расписание {schedule.shape} не покрывает горизонт {horizon}")
        if ref.horizon < horizon:
            raise DimensionError(f"Опорная траектория короче горизонта: {ref.horizon} < {horizon}")
        x0 = np.asarray(x0, dtype=float).reshape(-1)
        if x0.size != STATE_DIM:
            raise DimensionError(f"Начальное состояние должно иметь 13 компонент: {x0.size}")

        legs = model.leg_indices
        missing = [leg for leg in range(4) if schedule[:horizon, leg].any() and leg not in legs]
        if missing:
            raise DimensionError(f"Опорные ноги {missing} отсутствуют в модели")

        a_qp, b_qp = self.condensed_dynamics(model, horizon)
        n_in = model.n_inputs

        q_bar = np.tile(np.asarray(cfg.state_weights), horizon)
        r_bar = np.tile(np.asarray(cfg.input_weights), model.n_legs * horizon)
        x_ref = ref.states[:horizon].reshape(-1)

        weighted = b_qp.T * q_bar
        h = 2.0 * (weighted @ b_qp + np.diag(r_bar))
        h = 0.5 * (h + h.T)
        g = 2.0 * weighted @ (a_qp @ x0 - x_ref)

        c, lower, upper = self._force_rows(schedule[:horizon], legs, cfg, n_in, horizon)

        if cfg.state_bounds is not None:
            c_s, l_s, u_s = self._state_rows(a_qp, b_qp, x0, cfg, horizon)
            c, lower, upper = np.vstack([c, c_s]), np.concatenate([lower, l_s]), np.concatenate([upper, u_s])

        logger.debug(f"QP: {h.shape[0]} переменных, {c.shape[0]} ограничений")
        return QpProblem(h=h, g=g, c=c, l=lower, u=upper, leg_indices=legs, horizon=horizon)

    def _force_rows(self, schedule: np.ndarray, legs, cfg: MpcConfig,
                    n_in: int, horizon: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        block, stance_lower, stance_upper = friction_rows(cfg.friction, cfg.f_min, cfg.u_max)
        n_rows = ROWS_PER_LEG * len(legs) * horizon

        c = np.zeros((n_rows, n_in * horizon))
        lower = np.zeros(n_rows)
        upper = np.zeros(n_rows)

        row = 0
        for k in range(horizon):
            if not schedule[k].any():
                logger.warning(f"Шаг {k} горизонта MPC без опорных ног")
            for column, leg in enumerate(legs):
                start = n_in * k + 3 * column
                c[row:row + ROWS_PER_LEG, start:start + 3] = block
                if schedule[k, leg]:
                    lower[row:row + ROWS_PER_LEG] = stance_lower
                    upper[row:row + ROWS_PER_LEG] = stance_upper
                # у ноги в переносе все пять строк - равенства нулю
                row += ROWS_PER_LEG
        return c, lower, upper

    def _state_rows(self, a_qp: np.ndarray, b_qp: np.ndarray, x0: np.ndarray,
                    cfg: MpcConfig, horizon: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Ограничения |x(k)| <= x_max: x_lo − Aqp·x0 <= Bqp·U <= x_hi − Aqp·x0"""
        lo = np.tile(np.asarray(cfg.state_bounds[0], dtype=float), horizon)
        hi = np.tile(np.asarray(cfg.state_bounds[1], dtype=float), horizon)
        free = a_qp @ x0
        keep = np.isfinite(lo) | np.isfinite(hi)
        return b_qp[keep], (lo - free)[keep], (hi - free)[keep]
