# src/tools/slip_hopper.py

import logging
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from src.agent.states import HopperPhase
from src.config import settings
from src.models.errors import StepSizeError
from src.models.hopper import HopperParams, HopperState

logger = logging.getLogger(__name__)

# Вектор интегрирования: x, z, vx, vz, pitch, pitch_rate, leg_angle, leg_angle_rate
X, Z, VX, VZ, PITCH, PITCH_RATE, LEG, LEG_RATE = range(8)


class SlipHopper:
    """Плоский прыгун Райберта: полет / сжатие / толчок

    Нога безмассовая, бедро совпадает с ЦМ корпуса. В опоре стопа закреплена,
    на корпус действуют сила пружины вдоль ноги и касательная сила τ_h/r от
    момента в бедре; корпус получает реакцию −τ_h.
    """

    def __init__(self, params: Optional[HopperParams] = None,
                 event_tol: float = settings.HOPPER_EVENT_TOL):
        self.params = params or HopperParams()
        self.event_tol = event_tol
        self._clamp_reported = False

    # ------------------------------------------------------------------ законы управления

    @staticmethod
    def _foot_offset(speed: float, speed_ref: float, stance_estimate: float, gain: float,
                     bias: float = 0.0) -> float:
        return speed * stance_estimate / 2.0 + gain * (speed - speed_ref) + bias

    def _leg_target(self, pitch: float, speed: float, leg_length: float, speed_ref: float,
                    stance_estimate: float, gain: float, bias: float = 0.0) -> Tuple[float, bool]:
        ratio = self._foot_offset(speed, speed_ref, stance_estimate, gain, bias) / leg_length
        clamped = abs(ratio) > 1.0
        return pitch - float(np.arcsin(np.clip(ratio, -1.0, 1.0))), clamped

    def flight_control(self, state: HopperState, speed_ref: float,
                       stance_estimate: Optional[float] = None,
                       gain: Optional[float] = None) -> float:
        """Целевой угол ноги Φ = Θ − arcsin(x_f / r), x_f = ẋ·T_s/2 + k_ẋ·(ẋ − ẋ_ref) + k_i·Σe"""
        stance_estimate = state.stance_estimate if stance_estimate is None else stance_estimate
        gain = self.params.speed_gain if gain is None else gain
        target, clamped = self._leg_target(state.pitch, state.vx, state.leg_length, speed_ref,
                                           stance_estimate, gain, self._integral_bias(state))
        if clamped:
            logger.warning(f"Смещение стопы больше длины ноги при ẋ = {state.vx:.3f}, ограничено")
        return target

    def _integral_bias(self, state: HopperState) -> float:
        return self.params.speed_integral_gain * state.speed_integral

    def _update_integral(self, state: HopperState, foot_x: float, time: float, speed_ref: float) -> float:
        """Накопление ошибки средней скорости шага при касании"""
        if state.hop_count < 1 or self.params.speed_integral_gain <= 0.0:
            return state.speed_integral
        error = (foot_x - state.foot_x) / (time - state.touchdown_time) - speed_ref
        if abs(error) >= settings.HOPPER_SPEED_INTEGRAL_BAND:
            return state.speed_integral
        limit = settings.HOPPER_SPEED_INTEGRAL_LIMIT / self.params.speed_integral_gain
        return float(np.clip(state.speed_integral + error, -limit, limit))

    def stance_control(self, state: HopperState) -> Tuple[float, float]:
        """Момент в бедре (ПД по тангажу к нулю) и выдвижение пружины в фазе толчка"""
        if self.params.servos_on:
            hip_torque = self.params.attitude_kp * state.pitch + self.params.attitude_kd * state.pitch_rate
        else:
            hip_torque = 0.0
        thrust = state.thrust if state.phase is HopperPhase.THRUST else 0.0
        return hip_torque, thrust

    # ------------------------------------------------------------------ геометрия опоры

    @staticmethod
    def _stance_geometry(y: np.ndarray, foot_x: float) -> Tuple[float, np.ndarray, float]:
        """Длина ноги r, единичный вектор стопа→корпус и скорость ṙ"""
        d = np.array([y[X] - foot_x, y[Z]])
        length = float(np.hypot(d[0], d[1]))
        axis = d / length
        rate = float(axis @ y[[VX, VZ]])
        return length, axis, rate

    def _leg_force(self, state: HopperState, y: np.ndarray, phase: HopperPhase) -> float:
        length, _, rate = self._stance_geometry(y, state.foot_x)
        rest = state.rest_length + (state.thrust if phase is HopperPhase.THRUST else 0.0)
        return state.spring * (rest - length) - self.params.leg_damping * rate

    # ------------------------------------------------------------------ динамика

    def _derivative(self, state: HopperState, phase: HopperPhase, y: np.ndarray,
                    speed_ref: float) -> np.ndarray:
        p = self.params
        dy = np.zeros(8)
        dy[X], dy[Z] = y[VX], y[VZ]
        dy[PITCH] = y[PITCH_RATE]

        if phase is HopperPhase.FLIGHT:
            dy[VZ] = -p.gravity
            dy[LEG] = y[LEG_RATE]
            if p.servos_on:
                target, _ = self._leg_target(y[PITCH], y[VX], state.rest_length, speed_ref,
                                             state.stance_estimate, p.speed_gain, self._integral_bias(state))
                w = p.servo_bandwidth
                dy[LEG_RATE] = w * w * (target - y[LEG]) - 2.0 * w * y[LEG_RATE]
            return dy

        length, axis, _ = self._stance_geometry(y, state.foot_x)
        force = self._leg_force(state, y, phase)
        hip_torque = p.attitude_kp * y[PITCH] + p.attitude_kd * y[PITCH_RATE] if p.servos_on else 0.0
        tangent = np.array([-axis[1], axis[0]])

        acceleration = (force * axis + hip_torque / length * tangent) / p.mass
        dy[VX] = acceleration[0]
        dy[VZ] = acceleration[1] - p.gravity
        dy[PITCH_RATE] = -hip_torque / p.inertia
        return dy

    def _rk4(self, state: HopperState, phase: HopperPhase, y: np.ndarray, h: float,
             speed_ref: float) -> np.ndarray:
        f = lambda v: self._derivative(state, phase, v, speed_ref)  # noqa: E731
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y_next = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if phase is not HopperPhase.FLIGHT:
            y_next[LEG], y_next[LEG_RATE] = self._stance_leg_angle(y_next, state.foot_x)
        return y_next

    @staticmethod
    def _stance_leg_angle(y: np.ndarray, foot_x: float) -> Tuple[float, float]:
        """Φ = Θ − γ, γ - абсолютный угол ноги от вертикали (стопа впереди при γ > 0)"""
        dx, dz = y[X] - foot_x, y[Z]
        gamma = np.arctan2(-dx, dz)
        gamma_rate = (-y[VX] * dz + dx * y[VZ]) / (dx * dx + dz * dz)
        return y[PITCH] - gamma, y[PITCH_RATE] - gamma_rate

    # ------------------------------------------------------------------ события

    def _event_function(self, state: HopperState, phase: HopperPhase) -> Callable[[np.ndarray], float]:
        if phase is HopperPhase.FLIGHT:
            # высота стопы
            return lambda y: y[Z] - state.rest_length * np.cos(y[PITCH] - y[LEG])
        if phase is HopperPhase.COMPRESSION:
            # −ṙ: переход при ṙ, пересекающей ноль снизу
            return lambda y: -self._stance_geometry(y, state.foot_x)[2]
        return lambda y: self._leg_force(state, y, HopperPhase.THRUST)

    def _transition(self, state: HopperState, y: np.ndarray, time: float,
                    speed_ref: float = 0.0) -> HopperState:
        if state.phase is HopperPhase.FLIGHT:
            gamma = y[PITCH] - y[LEG]
            foot_x = float(y[X] + state.rest_length * np.sin(gamma))
            self._clamp_reported = False
            logger.debug(f"Касание при t = {time:.6f}, γ = {gamma:.4f}")
            return self._from_vector(state, y, time).evolve(
                phase=HopperPhase.COMPRESSION,
                foot_x=foot_x,
                leg_length=state.rest_length,
                touchdown_time=time,
                hop_count=state.hop_count + 1,
                speed_integral=self._update_integral(state, foot_x, time, speed_ref),
            )
        if state.phase is HopperPhase.COMPRESSION:
            return self._from_vector(state, y, time).evolve(phase=HopperPhase.THRUST)

        stance = time - state.touchdown_time
        logger.debug(f"Отрыв при t = {time:.6f}, длительность опоры {stance:.4f} с")
        lifted = self._from_vector(state, y, time)
        return lifted.evolve(
            phase=HopperPhase.FLIGHT,
            leg_length=state.rest_length,
            leg_angle_rate=0.0,
            stance_estimate=stance,
        )

    # ------------------------------------------------------------------ преобразования

    @staticmethod
    def _to_vector(state: HopperState) -> np.ndarray:
        return np.array([state.x, state.z, state.vx, state.vz, state.pitch, state.pitch_rate,
                         state.leg_angle, state.leg_angle_rate], dtype=float)

    def _from_vector(self, state: HopperState, y: np.ndarray, time: float) -> HopperState:
        leg_length = state.leg_length
        if state.phase is not HopperPhase.FLIGHT:
            leg_length = self._stance_geometry(y, state.foot_x)[0]
        return state.evolve(
            x=float(y[X]), z=float(y[Z]), vx=float(y[VX]), vz=float(y[VZ]),
            pitch=float(y[PITCH]), pitch_rate=float(y[PITCH_RATE]),
            leg_angle=float(y[LEG]), leg_angle_rate=float(y[LEG_RATE]),
            leg_length=float(leg_length), time=time,
        )

    # ------------------------------------------------------------------ шаг

    def step_hybrid(self, state: HopperState, dt: float, speed_ref: float = 0.0) -> HopperState:
        """Шаг RK4 с поиском событий бисекцией до event_tol

        События: касание (высота стопы через 0), максимум сжатия (ṙ через 0 снизу),
        отрыв (сила ноги через 0). После события интегрирование продолжается
        в новой фазе до конца шага.
        """
        if not 0.0 < dt <= settings.HOPPER_MAX_DT:
            raise StepSizeError(f"Шаг прыгуна {dt} вне (0, {settings.HOPPER_MAX_DT}]")

        if state.in_flight and self.params.servos_on and not self._clamp_reported:
            _, clamped = self._leg_target(state.pitch, state.vx, state.rest_length, speed_ref,
                                          state.stance_estimate, self.params.speed_gain,
                                          self._integral_bias(state))
            if clamped:
                self._clamp_reported = True
                logger.warning(f"Смещение стопы больше длины ноги при ẋ = {state.vx:.3f}, ограничено")

        remaining = dt
        current = state
        while remaining > 0.0:
            y0 = self._to_vector(current)
            event = self._event_function(current, current.phase)
            e0 = event(y0)
            y1 = self._rk4(current, current.phase, y0, remaining, speed_ref)

            if not (e0 > 0.0 and event(y1) <= 0.0):
                current = self._track_apex(current, self._from_vector(current, y1, current.time + remaining))
                break

            low, high = 0.0, remaining
            while high - low > self.event_tol:
                middle = 0.5 * (low + high)
                if event(self._rk4(current, current.phase, y0, middle, speed_ref)) <= 0.0:
                    high = middle
                else:
                    low = middle

            y_event = self._rk4(current, current.phase, y0, high, speed_ref)
            current = self._track_apex(current, self._transition(current, y_event, current.time + high, speed_ref))
            remaining -= high

        return current

    @staticmethod
    def _track_apex(before: HopperState, after: HopperState) -> HopperState:
        """Высота вершины полета по баллистике в момент смены знака vz"""
        if before.in_flight and after.in_flight and before.vz > 0.0 >= after.vz:
            apex = before.z + before.vz ** 2 / (2.0 * settings.GRAVITY[2])
            return after.evolve(last_apex=float(apex))
        return after

    # ------------------------------------------------------------------ энергия и прогон

    def energy(self, state: HopperState) -> float:
        """Механическая энергия: кинетическая + потенциальная + энергия пружины в опоре"""
        p = self.params
        energy = 0.5 * p.mass * (state.vx ** 2 + state.vz ** 2) + 0.5 * p.inertia * state.pitch_rate ** 2
        energy += p.mass * p.gravity * state.z
        if not state.in_flight:
            energy += 0.5 * state.spring * (state.active_rest_length - state.leg_length) ** 2
        return float(energy)

    def simulate(self, state: HopperState, duration: float, dt: float = settings.HOPPER_MAX_DT,
                 speed_ref: float = 0.0, max_hops: Optional[int] = None) -> Dict[str, Any]:
        """Прогон прыгуна с журналом состояний и сводкой по прыжкам

        Returns:
            словарь: status, states (список HopperState по шагам),
            hops (касания: номер, время, x, вершина предыдущего полета, энергия),
            phases (последовательность фаз)
        """
        states: List[HopperState] = [state]
        hops: List[Dict[str, float]] = []
        phases: List[str] = [state.phase.value]
        current = state
        steps = int(round(duration / dt))

        for _ in range(steps):
            previous = current
            current = self.step_hybrid(current, dt, speed_ref)
            states.append(current)

            if current.phase is not previous.phase:
                phases.append(current.phase.value)
            if current.hop_count > previous.hop_count:
                hops.append({
                    'hop': current.hop_count,
                    'time': current.touchdown_time,
                    'x': current.foot_x,
                    'apex': previous.last_apex,
                    'previous_stance': previous.stance_estimate,
                    'energy': self.energy(current),
                })
                if max_hops is not None and current.hop_count >= max_hops:
                    break
            if current.z <= 0.0 or not np.isfinite(current.z):
                logger.error(f"Прыгун упал при t = {current.time:.3f}")
                return {'status': 'fallen', 'states': states, 'hops': hops, 'phases': phases}

        return {'status': 'success', 'states': states, 'hops': hops, 'phases': phases}

    @staticmethod
    def stride_speeds(hops: List[Dict[str, float]]) -> np.ndarray:
        """Средняя скорость между соседними касаниями"""
        if len(hops) < 2:
            return np.zeros(0)
        x = np.array([hop['x'] for hop in hops])
        t = np.array([hop['time'] for hop in hops])
        return np.diff(x) / np.diff(t)
