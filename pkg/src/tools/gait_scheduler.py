# src/tools/gait_scheduler.py

import logging
from typing import Dict, List, Tuple

import numpy as np

from src.config import settings
from src.models.control import GaitSchedule, VirtualLegGroup

logger = logging.getLogger(__name__)


class GaitScheduler:
    """Расписание контактов по фазовым сдвигам и коэффициенту опоры"""

    @staticmethod
    def _cycle_fraction(gait: GaitSchedule, t: np.ndarray) -> np.ndarray:
        """frac(t/T − φᵢ) для каждой ноги"""
        offsets = np.asarray(gait.offsets)
        return np.mod(np.asarray(t, dtype=float)[..., None] / gait.period - offsets, 1.0)

    def schedule_contacts(self, gait: GaitSchedule, t: float, horizon: int, dt_mpc: float) -> np.ndarray:
        """Таблица контактов N×4: нога i в опоре на шаге k, если frac((t + k·dt)/T − φᵢ) < d"""
        times = t + dt_mpc * np.arange(horizon)
        return self._cycle_fraction(gait, times) < gait.duty

    def leg_phases(self, gait: GaitSchedule, t: float) -> List[Dict[str, float]]:
        """Режим и прогресс внутри фазы для каждой ноги

        Returns:
            список из 4 словарей: stance (bool), progress в [0, 1),
            remaining - оставшееся время текущей фазы, с
        """
        fractions = self._cycle_fraction(gait, t)
        phases = []
        for fraction in fractions:
            if fraction < gait.duty:
                progress = fraction / gait.duty
                remaining = (gait.duty - fraction) * gait.period
                phases.append({'stance': True, 'progress': float(progress), 'remaining': float(remaining)})
            else:
                progress = (fraction - gait.duty) / (1.0 - gait.duty)
                remaining = (1.0 - fraction) * gait.period
                phases.append({'stance': False, 'progress': float(progress), 'remaining': float(remaining)})
        return phases

    def virtual_leg_groups(self, gait: GaitSchedule) -> List[VirtualLegGroup]:
        """Ноги с одинаковым фазовым сдвигом образуют одну виртуальную ногу"""
        groups: Dict[float, List[int]] = {}
        for leg, offset in enumerate(gait.offsets):
            groups.setdefault(round(offset, 12), []).append(leg)
        return [
            VirtualLegGroup(members=tuple(members), phase=phase, equal_force=len(members) > 1)
            for phase, members in sorted(groups.items())
        ]

    def format_cycle(self, gait: GaitSchedule, steps: int = 16) -> List[Tuple[str, str]]:
        """Строки таблицы контактов на один цикл: (имя ноги, '#' опора / '.' перенос)"""
        table = self.schedule_contacts(gait, 0.0, steps, gait.period / steps)
        return [
            (name, ''.join('#' if flag else '.' for flag in table[:, leg]))
            for leg, name in enumerate(settings.LEG_NAMES)
        ]
