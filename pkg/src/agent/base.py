# src/agent/base.py

from typing import Any, Dict, List, Optional, Sequence
import logging

import numpy as np

from .states import ControllerState, LegMode
from .memory import ControllerMemory
from .communicator import Communicator
from src.models.control import ControlOutput, FootFeedback, GaitSchedule, LegCommand, TwistCommand
from src.models.robot import BodyParams, RobotState
from src.models.scenario import QuadConfig
from src.tools.toolkit import ToolKit
from src.stages.stage_1.gait_planning import GaitPlanner
from src.stages.stage_2.force_planning import ForcePlanner
from src.stages.stage_3.swing_control import SwingLegController
from src.stages.stage_4.stance_control import StanceLegController

logger = logging.getLogger(__name__)


class LocomotionController:
    """Контроллер четвероногого робота, один вызов control_tick на такт 1 кГц

    Владелец один: объект хранит теплый старт QP, удерживаемые силы и начала
    траекторий переноса между тиками.
    """

    def __init__(self, config: Optional[QuadConfig] = None, params: Optional[BodyParams] = None,
                 communicator: Optional[Communicator] = None,
                 ground_table: Optional[Sequence[float]] = None):
        """Инициализация контроллера и его этапов

        Args:
            config: настройки MPC, решателя и переноса
            params: модель корпуса контроллера; по умолчанию из config (номинальная)
            communicator: вывод сообщений
            ground_table: высоты точек постановки по номеру шага ноги
        """
        self.config = config or QuadConfig()
        self.params = params or BodyParams(mass=self.config.mass, inertia=np.diag(self.config.inertia))
        self.state = ControllerState.IDLE
        self.memory = ControllerMemory()
        self.communicator = communicator or Communicator()
        self.tools = ToolKit()
        self.ground_table = list(ground_table) if ground_table else None

        # Инициализация этапов тика
        self.gait_planner = GaitPlanner(
            self.tools,
            self.memory,
            self.communicator,
            self.config.mpc.to_config(),
        )
        self.force_planner = ForcePlanner(
            self.tools,
            self.memory,
            self.communicator,
            self.params,
            self.config,
        )
        self.swing_controller = SwingLegController(
            self.tools,
            self.memory,
            self.communicator,
            self.params,
            self.config,
        )
        self.stance_controller = StanceLegController(
            self.tools,
            self.memory,
            self.communicator,
            self.params,
        )

    def reset(self):
        """Сброс памяти перед новым прогоном"""
        self.memory.clear_session()
        self.state = ControllerState.IDLE

    def control_tick(self, state: RobotState, gait: GaitSchedule, cmd: TwistCommand, t: float,
                     feet: FootFeedback) -> ControlOutput:
        """Один тик: походка → силы → перенос → опора

        Args:
            state: состояние корпуса (истинное)
            gait: походка
            cmd: желаемая скорость
            t: время, с
            feet: положения и скорости стоп в мире

        Returns:
            ControlOutput: 4 команды ногам (по порядку FL..RR), силы 4×3 и диагностика
        """
        # Этап 1: походка и опорная траектория
        self.state = ControllerState.GAIT_PLANNING
        gait_plan = self.gait_planner.plan(state, gait, cmd, t)

        # Этап 2: силы реакции опоры
        self.state = ControllerState.FORCE_PLANNING
        force_plan = self.force_planner.plan(state, gait_plan, feet, t)

        # Этап 3: ноги в переносе
        self.state = ControllerState.SWING_CONTROL
        swing = self.swing_controller.control(state, gait, gait_plan, cmd, feet, t, self.ground_table)

        # Этап 4: опорные ноги
        self.state = ControllerState.STANCE_CONTROL
        stance = self.stance_controller.control(state, gait_plan['contact'], force_plan['forces'], feet, t)

        commands: List[LegCommand] = []
        for leg in range(4):
            command = stance['commands'].get(leg) or swing['commands'].get(leg)
            commands.append(command)
        joint_velocities = np.zeros((4, 3))
        for leg, qd in {**swing['joint_velocities'], **stance['joint_velocities']}.items():
            joint_velocities[leg] = qd

        self.memory.update_context({'contact': gait_plan['contact'].copy()})
        self.state = ControllerState.IDLE

        diagnostics: Dict[str, Any] = {
            'status': 'fallback' if force_plan['status'] == 'fallback' else 'success',
            'force_status': force_plan['status'],
            'qp_status': force_plan['qp_status'],
            'qp_iterations': force_plan['iterations'],
            'solved_now': force_plan['solved_now'],
            'contact': gait_plan['contact'].copy(),
            'schedule': gait_plan['schedule'],
            'swing_progress': swing['progress'],
            'swing_accelerations': swing['accelerations'],
            'footholds': swing['footholds'],
            'joint_velocities': joint_velocities,
            'singular_legs': sorted(swing['singular'] + stance['singular']),
        }
        return ControlOutput(commands=commands, forces=force_plan['forces'], diagnostics=diagnostics)

    @staticmethod
    def modes(output: ControlOutput) -> List[LegMode]:
        return [command.mode for command in output.commands]
