# src/simulation/harness.py

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.agent.base import LocomotionController
from src.agent.states import HopperPhase
from src.config import settings
from src.models.control import ControlOutput, FootFeedback
from src.models.errors import SimulationError, SingularLegError
from src.models.hopper import HopperState
from src.models.robot import BodyParams, ContactSet, RobotState
from src.models.scenario import HopperScenario, QuadConfig, Scenario
from src.tools.leg_kinematics import to_hip_frame
from src.tools.rigid_body import world_inertia
from src.tools.slip_hopper import SlipHopper
from src.tools.toolkit import ToolKit

logger = logging.getLogger(__name__)

LEGS = settings.LEG_NAMES


def log_columns() -> List[str]:
    """Фиксированный порядок колонок журнала, время первым"""
    columns = ['time', 'roll', 'pitch', 'yaw', 'x', 'y', 'z', 'wx', 'wy', 'wz', 'vx', 'vy', 'vz']
    columns += [f"r{i}{j}" for i in range(3) for j in range(3)]
    columns += ['cmd_vx', 'cmd_vy', 'cmd_yaw_rate']
    columns += [f"foot_{axis}_{leg}" for leg in LEGS for axis in 'xyz']
    columns += [f"f{axis}_{leg}" for leg in LEGS for axis in 'xyz']
    columns += [f"tau{joint}_{leg}" for leg in LEGS for joint in range(3)]
    columns += ['qp_status', 'qp_iterations']
    columns += [f"mode_{leg}" for leg in LEGS]
    return columns


class SimulationHarness:
    """Замкнутый контур: динамика корпуса под управлением LocomotionController

    Опорные стопы закреплены в точке касания, на корпус действуют решенные силы.
    Стопы в переносе - точечные массы под силой импедансного регулятора
    с прямой связью по ускорению цели.
    """

    def __init__(self, config: Optional[QuadConfig] = None):
        self.config = config or QuadConfig()
        self.tools = ToolKit()
        self.hip_offsets = np.array(settings.HIP_OFFSETS)

    # ------------------------------------------------------------------ вспомогательное

    @staticmethod
    def apply_impulse(state: RobotState, params: BodyParams, impulse: Sequence[float],
                      point: Sequence[float]) -> RobotState:
        """Мгновенный импульс: Δv = J/m, Δω = I_w⁻¹·(r × J), r в системе корпуса"""
        impulse = np.asarray(impulse, dtype=float)
        lever = state.rotation @ np.asarray(point, dtype=float)
        delta_omega = np.linalg.solve(world_inertia(state.rotation, params), np.cross(lever, impulse))
        return state.with_velocity(
            linear=state.linear_velocity + impulse / params.mass,
            angular=state.angular_velocity + delta_omega,
        )

    @staticmethod
    def is_fallen(state: RobotState, nominal_height: float) -> bool:
        roll, pitch, _ = state.euler
        return bool(state.position[2] < settings.FALL_HEIGHT_RATIO * nominal_height
                    or abs(roll) > settings.FALL_TILT or abs(pitch) > settings.FALL_TILT)

    def _swing_foot_force(self, state: RobotState, leg: int, feet: np.ndarray, velocities: np.ndarray,
                          torques: np.ndarray) -> np.ndarray:
        """Сила ноги на стопу в мире: R·J⁻ᵀ·τ"""
        measured = to_hip_frame(state, self.hip_offsets[leg], feet[leg], velocities[leg])
        kin = self.tools.leg_from_foot(measured['position'], measured['velocity'], leg)
        return state.rotation @ self.tools.foot_force(kin, torques)

    @staticmethod
    def _row(t: float, state: RobotState, cmd, feet: np.ndarray, output: ControlOutput) -> List[Any]:
        row: List[Any] = [t]
        row += list(state.euler) + list(state.position) + list(state.angular_velocity) + list(state.linear_velocity)
        row += list(state.rotation.reshape(-1))
        row += [cmd.vx, cmd.vy, cmd.yaw_rate]
        row += list(feet.reshape(-1))
        row += list(output.forces.reshape(-1))
        row += list(output.torque_vector())
        row += [output.diagnostics['qp_status'] or 'none', output.diagnostics['qp_iterations']]
        row += [command.mode.value for command in output.commands]
        return row

    # ------------------------------------------------------------------ четвероногий робот

    def run_scenario(self, scenario: Scenario) -> Dict[str, Any]:
        """Детерминированный прогон сценария

        Returns:
            словарь: status (success / fallen), log (DataFrame), metrics
        Raises:
            SimulationError: нечисловое состояние; несет журнал до момента отказа
        """
        cfg = self.config
        dt = cfg.sim.control_dt
        nominal = BodyParams(mass=cfg.mass, inertia=np.diag(cfg.inertia))
        true_params = nominal.scaled(scenario.perturbation.mass_scale, scenario.perturbation.inertia_scale)
        self.hip_offsets = nominal.hip_offsets

        controller = LocomotionController(cfg, nominal, ground_table=scenario.foothold_heights)
        gait = scenario.gait.schedule()
        table = scenario.foothold_heights

        state = RobotState.at_rest(scenario.initial.height, scenario.initial.yaw).with_velocity(
            linear=np.asarray(scenario.initial.velocity, dtype=float))
        feet = self.tools.foot_planner.nominal_footholds(state.position, state.rotation, nominal.hip_offsets)
        foot_velocities = np.zeros((4, 3))
        pinned = np.ones(4, dtype=bool)
        touchdowns = np.zeros(4, dtype=int)

        pending = sorted(scenario.disturbances, key=lambda d: d.time)
        steps = int(round(scenario.duration / dt))
        rows: List[List[Any]] = []
        support_errors: List[float] = []
        diagonal_gaps: List[float] = []
        iterations: List[int] = []
        fallbacks = 0
        energy = 0.0
        fallen = False
        fall_time = None
        weight = nominal.mass * nominal.gravity[2]

        logger.info(f"Сценарий {scenario.name}: {steps} тиков, походка {gait.name.value}")

        for tick in range(steps):
            t = tick * dt

            while pending and pending[0].time < t + 0.5 * dt:
                disturbance = pending.pop(0)
                state = self.apply_impulse(state, true_params, disturbance.impulse, disturbance.point)
                logger.info(f"t = {t:.3f}: импульс {disturbance.impulse}")

            cmd = scenario.twist_at(t)
            output = controller.control_tick(state, gait, cmd, t, FootFeedback(feet, foot_velocities))
            diagnostics = output.diagnostics
            contact = diagnostics['contact']
            forces = output.forces
            rows.append(self._row(t, state, cmd, feet, output))

            if diagnostics['solved_now']:
                iterations.append(diagnostics['qp_iterations'])
                if contact.all():
                    support_errors.append(abs(forces[:, 2].sum() - weight) / weight)
                    diagonal_gaps.append(max(abs(forces[0, 2] - forces[3, 2]), abs(forces[1, 2] - forces[2, 2])))
            if diagnostics['status'] == 'fallback':
                fallbacks += 1
            energy += float(output.torque_vector() @ diagnostics['joint_velocities'].reshape(-1)) * dt

            # Стопы в переносе: точечная масса под силой регулятора
            next_feet = feet.copy()
            next_velocities = foot_velocities.copy()
            for leg in range(4):
                if contact[leg]:
                    if not pinned[leg]:
                        ground = self.tools.foot_planner.ground_height(table, int(touchdowns[leg]))
                        next_feet[leg, 2] = ground
                        touchdowns[leg] += 1
                    next_velocities[leg] = 0.0
                    continue
                command = output.commands[leg]
                try:
                    force = self._swing_foot_force(state, leg, feet, foot_velocities, command.torques)
                except (SingularLegError, np.linalg.LinAlgError):
                    force = np.zeros(3)
                acceleration = diagnostics['swing_accelerations'].get(leg, np.zeros(3)) + force / cfg.sim.foot_mass
                next_velocities[leg] = foot_velocities[leg] + acceleration * dt
                next_feet[leg] = feet[leg] + next_velocities[leg] * dt
            pinned = contact.copy()

            contacts = ContactSet(foot_positions=feet, in_contact=contact, forces=forces)
            state = self.tools.integrate(state, true_params, contacts, dt)
            feet, foot_velocities = next_feet, next_velocities

            if not (np.all(np.isfinite(state.position)) and np.all(np.isfinite(state.linear_velocity))):
                log = pd.DataFrame(rows, columns=log_columns())
                raise SimulationError(f"Нечисловое состояние корпуса при t = {t:.3f}", log=log, time=t)

            if self.is_fallen(state, scenario.initial.height):
                fallen = True
                fall_time = (tick + 1) * dt
                logger.warning(f"Сценарий {scenario.name}: падение при t = {fall_time:.3f}")
                break

        log = pd.DataFrame(rows, columns=log_columns())
        metrics = self.summarize(log, scenario, fallen=fallen, fall_time=fall_time, iterations=iterations,
                                 fallbacks=fallbacks, energy=energy, support_errors=support_errors,
                                 diagonal_gaps=diagonal_gaps, final_state=state)
        return {'status': metrics['status'], 'log': log, 'metrics': metrics}

    @staticmethod
    def heading_velocities(log: pd.DataFrame) -> pd.DataFrame:
        """Скорости в системе рыскания: вперед и вбок"""
        cos_yaw, sin_yaw = np.cos(log['yaw']), np.sin(log['yaw'])
        return pd.DataFrame({
            'forward': cos_yaw * log['vx'] + sin_yaw * log['vy'],
            'lateral': -sin_yaw * log['vx'] + cos_yaw * log['vy'],
        })

    def summarize(self, log: pd.DataFrame, scenario: Scenario, fallen: bool, fall_time: Optional[float],
                  iterations: List[int], fallbacks: int, energy: float, support_errors: List[float],
                  diagonal_gaps: List[float], final_state: RobotState) -> Dict[str, Any]:
        """Плоский словарь метрик прогона"""
        metrics: Dict[str, Any] = {
            'status': 'fallen' if fallen else 'success',
            'scenario': scenario.name,
            'fall': fallen,
            'fall_time': fall_time,
            'ticks': len(log),
        }

        heading = self.heading_velocities(log)
        for index, (start, end) in enumerate(scenario.segment_bounds()):
            inside = (log['time'] >= start - 1e-12) & (log['time'] < end - 1e-12)
            if not inside.any():
                continue
            error = np.sqrt((heading['forward'][inside] - log['cmd_vx'][inside]) ** 2
                            + (heading['lateral'][inside] - log['cmd_vy'][inside]) ** 2)
            metrics[f"velocity_rms_segment_{index}"] = float(np.sqrt(np.mean(error ** 2)))
            metrics[f"yaw_rate_rms_segment_{index}"] = float(
                np.sqrt(np.mean((log['wz'][inside] - log['cmd_yaw_rate'][inside]) ** 2)))

            steady = inside & (log['time'] >= 0.5 * (start + end))
            if steady.any():
                metrics[f"steady_vx_segment_{index}"] = float(heading['forward'][steady].mean())
                metrics[f"steady_vy_segment_{index}"] = float(heading['lateral'][steady].mean())

        metrics['max_abs_roll'] = float(log['roll'].abs().max()) if len(log) else 0.0
        metrics['max_abs_pitch'] = float(log['pitch'].abs().max()) if len(log) else 0.0
        metrics['mean_qp_iterations'] = float(np.mean(iterations)) if iterations else 0.0
        metrics['mpc_solves'] = len(iterations)
        metrics['fallback_ticks'] = fallbacks
        metrics['energy_proxy'] = energy
        if support_errors:
            metrics['max_support_error'] = float(max(support_errors))
            metrics['max_diagonal_fz_gap'] = float(max(diagonal_gaps))
        metrics['final_speed'] = float(np.linalg.norm(final_state.linear_velocity))
        metrics['final_height'] = float(final_state.position[2])
        return metrics

    # ------------------------------------------------------------------ прыгун

    @staticmethod
    def run_hopper(scenario: HopperScenario) -> Dict[str, Any]:
        """Прогон прыгуна SLIP

        Returns:
            словарь: status, log (по шагам), hops (по касаниям), metrics
        """
        params = scenario.params()
        hopper = SlipHopper(params)
        initial = HopperState.dropped(scenario.drop_height, scenario.initial_speed, params,
                                      rest_length=scenario.rest_length, spring=scenario.spring,
                                      thrust=scenario.thrust)
        result = hopper.simulate(initial, scenario.duration, scenario.dt, scenario.speed_ref)

        log = pd.DataFrame([{
            'time': s.time, 'x': s.x, 'z': s.z, 'vx': s.vx, 'vz': s.vz,
            'pitch': s.pitch, 'pitch_rate': s.pitch_rate, 'leg_angle': s.leg_angle,
            'leg_length': s.leg_length, 'phase': s.phase.value, 'hop': s.hop_count,
            'energy': hopper.energy(s),
        } for s in result['states']])
        hops = pd.DataFrame(result['hops'], columns=['hop', 'time', 'x', 'apex', 'previous_stance', 'energy'])

        speeds = hopper.stride_speeds(result['hops'])
        tail = speeds[-5:] if speeds.size else speeds
        final = result['states'][-1]
        metrics: Dict[str, Any] = {
            'status': result['status'],
            'hops': int(final.hop_count),
            'speed_ref': scenario.speed_ref,
            'mean_stride_speed_last5': float(tail.mean()) if tail.size else 0.0,
            'last_apex': float(final.last_apex) if np.isfinite(final.last_apex) else None,
            'last_stance_duration': float(final.stance_estimate),
            'max_abs_pitch': float(log['pitch'].abs().max()),
            'final_phase': final.phase.value,
            'final_x': float(final.x),
        }
        if final.phase is not HopperPhase.FLIGHT:
            metrics['final_leg_length'] = float(final.leg_length)
        return {'status': result['status'], 'log': log, 'hops': hops, 'metrics': metrics}


def run_scenario(scenario: Scenario, config: Optional[QuadConfig] = None) -> Dict[str, Any]:
    """Прогон одного сценария (функция верхнего уровня для пула процессов)"""
    return SimulationHarness(config).run_scenario(scenario)


def run_hopper(scenario: HopperScenario) -> Dict[str, Any]:
    return SimulationHarness.run_hopper(scenario)


def run_batch(jobs: Sequence[Tuple[Scenario, Optional[QuadConfig]]], workers: int = 1) -> List[Dict[str, Any]]:
    """Независимые прогоны (сценарий, настройки); при workers > 1 - в пуле процессов, порядок сохраняется"""
    scenarios = [scenario for scenario, _ in jobs]
    configs = [config for _, config in jobs]
    if workers <= 1 or len(jobs) <= 1:
        return [run_scenario(scenario, config) for scenario, config in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(run_scenario, scenarios, configs))
