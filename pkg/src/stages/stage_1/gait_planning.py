# src/stages/stage_1/gait_planning.py

from typing import Any, Dict
import logging

import numpy as np

from src.models.control import GaitSchedule, TwistCommand
from src.models.robot import RobotState

logger = logging.getLogger(__name__)


class GaitPlanner:
    """Планирование походки: таблица контактов на горизонт и опорная траектория"""

    def __init__(self, tools, memory, communicator, mpc_config):
        self.tools = tools
        self.memory = memory
        self.communicator = communicator
        self.mpc_config = mpc_config

    def plan(self, state: RobotState, gait: GaitSchedule, cmd: TwistCommand, t: float) -> Dict[str, Any]:
        """Контакты, фазы ног и опорная траектория на момент t

        Returns:
            словарь: status, schedule (N×4), contact (флаги шага 0), phases,
            reference, contact_changed, virtual_legs
        """
        cfg = self.mpc_config
        schedule = self.tools.schedule_contacts(gait, t, cfg.horizon, cfg.dt)
        phases = self.tools.leg_phases(gait, t)
        contact = np.array([phase['stance'] for phase in phases], dtype=bool)

        previous = self.memory.get_context().get('contact')
        changed = previous is None or bool(np.any(previous != contact))
        if changed and previous is not None:
            lifted = np.flatnonzero(previous & ~contact).tolist()
            landed = np.flatnonzero(~previous & contact).tolist()
            logger.debug(f"t = {t:.3f}: отрыв {lifted}, касание {landed}")

        reference = self.tools.reference(state, cmd, cfg.horizon, cfg.dt)

        return {
            'status': 'success',
            'schedule': schedule,
            'contact': contact,
            'previous_contact': previous,
            'contact_changed': changed,
            'phases': phases,
            'reference': reference,
            'virtual_legs': self.tools.virtual_legs(gait),
        }
