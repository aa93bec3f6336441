# src/tools/motor_foc.py

import logging
from typing import Dict, Optional, Tuple

import numpy as np

from src.config import settings
from src.models.motor import DqCurrents, PhaseCurrents, PiGains, PiState, RlAxis

logger = logging.getLogger(__name__)

SQRT3 = np.sqrt(3.0)


class FocCurrentLoop:
    """Токовый контур FOC: преобразования Кларка/Парка и ПИ-регуляторы осей d, q

    Масштаб Кларка амплитудно-инвариантный: симметричные токи амплитуды A
    дают |(i_d, i_q)| = A, мгновенная мощность p = 3/2·(v_d·i_d + v_q·i_q) + 3·v_0·i_0.
    """

    # ------------------------------------------------------------------ преобразования

    @staticmethod
    def clarke(abc: np.ndarray) -> np.ndarray:
        """(a, b, c) → (α, β, 0)"""
        a, b, c = np.asarray(abc, dtype=float)
        alpha = (2.0 * a - b - c) / 3.0
        beta = (b - c) / SQRT3
        zero = (a + b + c) / 3.0
        return np.array([alpha, beta, zero])

    @staticmethod
    def inverse_clarke(alpha_beta_zero: np.ndarray) -> np.ndarray:
        alpha, beta, zero = np.asarray(alpha_beta_zero, dtype=float)
        return np.array([
            alpha + zero,
            -0.5 * alpha + SQRT3 / 2.0 * beta + zero,
            -0.5 * alpha - SQRT3 / 2.0 * beta + zero,
        ])

    @staticmethod
    def park(alpha_beta_zero: np.ndarray, theta: float) -> np.ndarray:
        """Поворот в систему ротора на электрический угол θ"""
        alpha, beta, zero = np.asarray(alpha_beta_zero, dtype=float)
        cos_t, sin_t = np.cos(theta), np.sin(theta)
        return np.array([alpha * cos_t + beta * sin_t, -alpha * sin_t + beta * cos_t, zero])

    @staticmethod
    def inverse_park(dq0: np.ndarray, theta: float) -> np.ndarray:
        d, q, zero = np.asarray(dq0, dtype=float)
        cos_t, sin_t = np.cos(theta), np.sin(theta)
        return np.array([d * cos_t - q * sin_t, d * sin_t + q * cos_t, zero])

    def dq0_transform(self, abc: PhaseCurrents, theta: float) -> DqCurrents:
        """Фазные величины → (d, q, 0) во вращающейся системе ротора"""
        d, q, zero = self.park(self.clarke(abc.as_array()), theta)
        return DqCurrents(d=float(d), q=float(q), zero=float(zero), theta=float(theta))

    def inverse_dq0(self, dq: DqCurrents, theta: Optional[float] = None) -> PhaseCurrents:
        """Обратное DQ0: величины ротора → фазные (токи или напряжения)"""
        angle = dq.theta if theta is None else theta
        a, b, c = self.inverse_clarke(self.inverse_park(dq.as_array(), angle))
        return PhaseCurrents(a=float(a), b=float(b), c=float(c))

    @staticmethod
    def power_abc(voltages: PhaseCurrents, currents: PhaseCurrents) -> float:
        return float(voltages.as_array() @ currents.as_array())

    @staticmethod
    def power_dq0(voltages: DqCurrents, currents: DqCurrents) -> float:
        return 1.5 * (voltages.d * currents.d + voltages.q * currents.q) + 3.0 * voltages.zero * currents.zero

    # ------------------------------------------------------------------ регулятор

    @staticmethod
    def _pi_axis(error: float, integral: float, gains: PiGains) -> Tuple[float, float]:
        limit = gains.voltage_limit
        integral = float(np.clip(integral + gains.ki * gains.dt * error, -limit, limit))
        output = float(np.clip(gains.kp * error + integral, -limit, limit))
        return output, integral

    def pi_current_step(self, reference: DqCurrents, measured: DqCurrents, gains: PiGains,
                        state: PiState) -> Tuple[DqCurrents, PiState]:
        """Один такт ПИ по осям d и q

        Интегратор ограничен пределом напряжения (anti-windup), выход - тем же пределом.

        Returns:
            (команда напряжения в системе ротора, новое состояние интеграторов)
        """
        v_d, integral_d = self._pi_axis(reference.d - measured.d, state.integral_d, gains)
        v_q, integral_q = self._pi_axis(reference.q - measured.q, state.integral_q, gains)
        if abs(v_d) >= gains.voltage_limit or abs(v_q) >= gains.voltage_limit:
            logger.debug(f"Насыщение напряжения: v_d = {v_d:.2f}, v_q = {v_q:.2f}")
        command = DqCurrents(d=v_d, q=v_q, zero=0.0, theta=measured.theta)
        return command, PiState(integral_d=integral_d, integral_q=integral_q)

    # ------------------------------------------------------------------ модель и настройка

    @staticmethod
    def rl_plant_step(current: float, voltage: float, axis: RlAxis, dt: float) -> float:
        """Точный шаг RL-цепи при постоянном напряжении на интервале dt"""
        decay = np.exp(-dt / axis.time_constant)
        return float(current * decay + voltage / axis.resistance * (1.0 - decay))

    @staticmethod
    def bandwidth_gains(axis: RlAxis, bandwidth: float, dt: float = settings.FOC_DT,
                        voltage_limit: float = settings.FOC_VOLTAGE_LIMIT) -> PiGains:
        """Компенсация полюса RL: kp = L·ω, ki = R·ω, замкнутый контур ω/(s + ω)

        Время нарастания до 90% равно ln(10)/ω.
        """
        if bandwidth <= 0:
            raise ValueError(f"Полоса контура должна быть положительной: {bandwidth}")
        return PiGains(kp=axis.inductance * bandwidth, ki=axis.resistance * bandwidth,
                       dt=dt, voltage_limit=voltage_limit)

    @staticmethod
    def rise_time(bandwidth: float) -> float:
        return float(np.log(10.0) / bandwidth)

    def step_response(self, reference: DqCurrents, axis: RlAxis, gains: PiGains,
                      duration: float) -> Dict[str, np.ndarray]:
        """Переходный процесс замкнутого контура на RL-модели (обе оси одинаковы)"""
        steps = int(round(duration / gains.dt))
        state = PiState()
        measured = DqCurrents(d=0.0, q=0.0)
        time = np.arange(steps + 1) * gains.dt
        currents = np.zeros((steps + 1, 2))
        voltages = np.zeros((steps + 1, 2))

        for k in range(steps):
            command, state = self.pi_current_step(reference, measured, gains, state)
            measured = DqCurrents(
                d=self.rl_plant_step(measured.d, command.d, axis, gains.dt),
                q=self.rl_plant_step(measured.q, command.q, axis, gains.dt),
            )
            voltages[k] = (command.d, command.q)
            currents[k + 1] = (measured.d, measured.q)

        return {'status': 'success', 'time': time, 'currents': currents, 'voltages': voltages}
