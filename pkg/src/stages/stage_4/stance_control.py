# src/stages/stage_4/stance_control.py

from typing import Any, Dict
import logging

import numpy as np

from src.agent.states import LegMode
from src.models.control import FootFeedback, LegCommand
from src.models.errors import SingularLegError
from src.models.robot import BodyParams, RobotState
from src.tools.leg_kinematics import to_hip_frame

logger = logging.getLogger(__name__)


class StanceLegController:
    """Опорные ноги: моменты τ = Jᵀ·Rᵀ·(−f) по решенным силам"""

    def __init__(self, tools, memory, communicator, params: BodyParams):
        self.tools = tools
        self.memory = memory
        self.communicator = communicator
        self.params = params

    def control(self, state: RobotState, contact: np.ndarray, forces: np.ndarray,
                feet: FootFeedback, t: float) -> Dict[str, Any]:
        commands: Dict[int, LegCommand] = {}
        joint_velocities: Dict[int, np.ndarray] = {}
        singular = []

        for leg in np.flatnonzero(contact):
            leg = int(leg)
            measured = to_hip_frame(state, self.params.hip_offsets[leg], feet.positions[leg], feet.velocities[leg])
            try:
                kin = self.tools.leg_from_foot(measured['position'], measured['velocity'], leg)
                torques = self.tools.stance_torques(kin, state.rotation, forces[leg], leg)
                joint_velocities[leg] = kin.qd
            except SingularLegError as e:
                logger.warning(f"t = {t:.3f}: {e}, моменты опорной ноги обнулены")
                torques = np.zeros(3)
                singular.append(leg)
                joint_velocities[leg] = np.zeros(3)
            commands[leg] = LegCommand(leg=leg, mode=LegMode.STANCE, torques=torques)

        return {'status': 'success', 'commands': commands, 'singular': singular,
                'joint_velocities': joint_velocities}
