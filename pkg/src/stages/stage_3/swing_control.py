# src/stages/stage_3/swing_control.py

from typing import Any, Dict, Optional, Sequence
import logging

import numpy as np

from src.agent.states import LegMode
from src.models.control import FootFeedback, GaitSchedule, LegCommand, TwistCommand
from src.models.errors import SingularLegError
from src.models.robot import BodyParams, RobotState
from src.models.scenario import QuadConfig
from src.tools.leg_kinematics import to_hip_frame

logger = logging.getLogger(__name__)


class SwingLegController:
    """Управление ногами в переносе: точка Райберта, кривая Безье, импеданс"""

    def __init__(self, tools, memory, communicator, params: BodyParams, config: QuadConfig):
        self.tools = tools
        self.memory = memory
        self.communicator = communicator
        self.params = params
        self.swing = config.swing

    def _register_liftoff(self, leg: int, previous: Optional[np.ndarray], feet: FootFeedback):
        context = self.memory.get_context()
        if previous is None or previous[leg] or not np.all(np.isfinite(context['swing_start'][leg])):
            context['swing_start'][leg] = feet.positions[leg]
            context['swing_count'][leg] += 1

    def control(self, state: RobotState, gait: GaitSchedule, gait_plan: Dict[str, Any], cmd: TwistCommand,
                feet: FootFeedback, t: float, ground_table: Optional[Sequence[float]] = None) -> Dict[str, Any]:
        """Команды ногам в переносе

        Точка постановки считается от положения плеча, предсказанного на момент
        касания (плечо + скорость корпуса × оставшееся время переноса).

        Returns:
            словарь: status, commands (нога -> LegCommand), footholds (4×3, NaN у опорных),
            accelerations (нога -> ускорение цели в мире), progress (нога -> фаза), singular
        """
        context = self.memory.get_context()
        contact = gait_plan['contact']
        previous = gait_plan['previous_contact']
        shoulders = self.tools.foot_planner.shoulder_points(state.position, state.rotation, self.params.hip_offsets)

        velocity = state.linear_velocity
        velocity_ref = cmd.world_velocity(state.yaw)
        footholds = np.full((4, 3), np.nan)
        commands: Dict[int, LegCommand] = {}
        accelerations: Dict[int, np.ndarray] = {}
        progress: Dict[int, float] = {}
        joint_velocities: Dict[int, np.ndarray] = {}
        singular = []

        for leg in np.flatnonzero(~contact):
            leg = int(leg)
            self._register_liftoff(leg, previous, feet)
            phase = gait_plan['phases'][leg]

            predicted = shoulders[leg] + velocity * phase['remaining']
            ground = self.tools.foot_planner.ground_height(ground_table, int(context['swing_count'][leg]) - 1)
            foothold = self.tools.foothold(
                velocity=velocity[:2], velocity_ref=velocity_ref[:2],
                stance_duration=gait.stance_duration, gain=self.swing.raibert_gain,
                hip_world=predicted, ground_height=ground,
            )
            target, target_velocity, target_acceleration = self.tools.swing_trajectory(
                start=context['swing_start'][leg], foothold=foothold, apex_height=self.swing.height,
                phase=phase['progress'], swing_duration=gait.swing_duration,
            )

            hip_offset = self.params.hip_offsets[leg]
            desired = to_hip_frame(state, hip_offset, target, target_velocity)
            measured = to_hip_frame(state, hip_offset, feet.positions[leg], feet.velocities[leg])
            try:
                kin = self.tools.leg_from_foot(measured['position'], measured['velocity'], leg)
                torques = self.tools.impedance_torques(kin, desired['position'], desired['velocity'],
                                                       self.swing.kp, self.swing.kd, leg)
                joint_velocities[leg] = kin.qd
            except SingularLegError as e:
                logger.warning(f"t = {t:.3f}: {e}, моменты ноги обнулены")
                torques = np.zeros(3)
                singular.append(leg)
                joint_velocities[leg] = np.zeros(3)

            footholds[leg] = foothold
            accelerations[leg] = target_acceleration
            progress[leg] = phase['progress']
            commands[leg] = LegCommand(leg=leg, mode=LegMode.SWING, torques=torques,
                                       foot_target=target, foot_target_velocity=target_velocity)

        self.memory.update_context({'footholds': footholds})
        return {
            'status': 'success',
            'commands': commands,
            'footholds': footholds,
            'accelerations': accelerations,
            'progress': progress,
            'joint_velocities': joint_velocities,
            'singular': singular,
        }
