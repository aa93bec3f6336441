# src/tools/toolkit.py

from typing import Dict, List, Optional, Union

import numpy as np

from src.config import settings
from src.models.control import GaitSchedule, LegKinematics, VirtualLegGroup
from src.models.mpc import LinearModel, MpcConfig, QpProblem, QpSolution, ReferenceTrajectory
from src.models.robot import BodyParams, ContactSet, RobotState
from .foot_planner import FootPlanner
from .gait_scheduler import GaitScheduler
from .leg_kinematics import LegKinematicsSolver
from .linearization import Linearizer
from .mpc_builder import MpcBuilder, ReferenceGenerator
from .qp_solver import AdmmQpSolver
from .rigid_body import RigidBodyDynamics


class ToolKit:
    """Набор инструментов для контроллера и симулятора"""

    def __init__(self, nominal_height: float = settings.NOMINAL_HEIGHT):
        # Инициализация всех инструментов
        self.dynamics = RigidBodyDynamics()
        self.linearizer = Linearizer()
        self.mpc_builder = MpcBuilder()
        self.reference_generator = ReferenceGenerator(nominal_height)
        self.qp_solver = AdmmQpSolver()
        self.gait_scheduler = GaitScheduler()
        self.foot_planner = FootPlanner()
        self.kinematics = LegKinematicsSolver()

    def integrate(self, state: RobotState, params: BodyParams, contacts: ContactSet, dt: float) -> RobotState:
        """Шаг динамики корпуса"""
        return self.dynamics.integrate_step(state, params, contacts, dt)

    def linearize(self, params: BodyParams, yaw: float, feet: ContactSet, dt: float,
                  com: Optional[np.ndarray] = None, all_legs: bool = False) -> LinearModel:
        """Дискретная линейная модель при текущем рыскании"""
        return self.linearizer.linearize(params, yaw, feet, dt, com=com, all_legs=all_legs)

    def reference(self, state: RobotState, twist, horizon: int, dt: float) -> ReferenceTrajectory:
        """Опорная траектория по команде скорости"""
        return self.reference_generator.generate(state, twist, horizon, dt)

    def build_mpc(self, model: LinearModel, schedule: np.ndarray, ref: ReferenceTrajectory,
                  cfg: MpcConfig, x0: np.ndarray) -> QpProblem:
        """Сборка конденсированной QP"""
        return self.mpc_builder.build_mpc(model, schedule, ref, cfg, x0)

    def solve_qp(self, problem: QpProblem, warm_start: Union[np.ndarray, QpSolution, None] = None,
                 tol: float = settings.QP_TOL, max_iters: int = settings.QP_MAX_ITERS) -> QpSolution:
        """Решение QP методом ADMM"""
        return self.qp_solver.solve(problem, warm_start=warm_start, tol=tol, max_iters=max_iters)

    def schedule_contacts(self, gait: GaitSchedule, t: float, horizon: int, dt: float) -> np.ndarray:
        """Таблица контактов на горизонт"""
        return self.gait_scheduler.schedule_contacts(gait, t, horizon, dt)

    def leg_phases(self, gait: GaitSchedule, t: float) -> List[Dict[str, float]]:
        """Фазы ног в момент t"""
        return self.gait_scheduler.leg_phases(gait, t)

    def virtual_legs(self, gait: GaitSchedule) -> List[VirtualLegGroup]:
        """Виртуальные ноги походки"""
        return self.gait_scheduler.virtual_leg_groups(gait)

    def foothold(self, **params) -> np.ndarray:
        """Точка постановки по Райберту"""
        return self.foot_planner.raibert_foot_placement(**params)

    def swing_trajectory(self, **params):
        """Траектория переноса стопы"""
        return self.foot_planner.swing_trajectory(**params)

    def leg_from_foot(self, foot_hip: np.ndarray, velocity_hip: np.ndarray, leg: int) -> LegKinematics:
        """Углы и скорости суставов по положению и скорости стопы в системе бедра"""
        side = 1.0 if leg in (0, 2) else -1.0
        kin = self.kinematics.inverse(foot_hip, side)
        return self.kinematics.with_foot_velocity(kin, velocity_hip, leg)

    def impedance_torques(self, kin: LegKinematics, p_des, v_des, kp, kd, leg: int) -> np.ndarray:
        """Моменты импедансного регулятора переноса"""
        return self.kinematics.impedance_torques(kin, p_des, v_des, kp, kd, leg)

    def stance_torques(self, kin: LegKinematics, rotation: np.ndarray, force: np.ndarray,
                       leg: int) -> np.ndarray:
        """Моменты опорной ноги по решенной силе"""
        return self.kinematics.stance_torques(kin, rotation, force, leg)

    def foot_force(self, kin: LegKinematics, torques: np.ndarray) -> np.ndarray:
        """Сила на стопе (система бедра), соответствующая моментам: J⁻ᵀ·τ"""
        return np.linalg.solve(self.kinematics.jacobian(kin).T, np.asarray(torques, dtype=float))
