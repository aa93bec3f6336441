# src/stages/stage_2/force_planning.py

from typing import Any, Dict
import logging

import numpy as np

from src.agent.states import QpStatus
from src.models.control import FootFeedback
from src.models.robot import BodyParams, ContactSet, RobotState
from src.models.scenario import QuadConfig
from src.tools.mpc_builder import state_vector

logger = logging.getLogger(__name__)


class ForcePlanner:
    """Планирование сил реакции опоры: линеаризация, сборка MPC, решение QP"""

    def __init__(self, tools, memory, communicator, params: BodyParams, config: QuadConfig):
        self.tools = tools
        self.memory = memory
        self.communicator = communicator
        self.params = params
        self.config = config
        self.mpc_config = config.mpc.to_config()

    def _solve_due(self, t: float, contact_changed: bool) -> bool:
        last = self.memory.get_context().get('last_solve_time')
        if last is None or contact_changed:
            return True
        return t - last >= self.mpc_config.dt - 1e-9

    def _model_feet(self, state: RobotState, contact: np.ndarray, feet: FootFeedback) -> np.ndarray:
        """Опорные ноги - фактические стопы, ноги в переносе - плановые точки постановки"""
        positions = feet.positions.copy()
        planned = self.memory.get_context().get('footholds')
        nominal = self.tools.foot_planner.nominal_footholds(
            state.position, state.rotation, self.params.hip_offsets)
        for leg in np.flatnonzero(~contact):
            target = planned[leg] if planned is not None else None
            positions[leg] = target if target is not None and np.all(np.isfinite(target)) else nominal[leg]
        return positions

    def plan(self, state: RobotState, gait_plan: Dict[str, Any], feet: FootFeedback, t: float) -> Dict[str, Any]:
        """Силы первого шага горизонта для всех ног

        Между решениями MPC силы удерживаются; решение повторяется по истечении
        шага MPC или при смене контактов. При недопустимой QP или нечисловых силах
        используется прошлое решение с затуханием.

        Returns:
            словарь: status (success / held / max_iters / fallback), forces (4×3),
            qp_status, iterations, solved_now
        """
        context = self.memory.get_context()
        contact = gait_plan['contact']

        if not self._solve_due(t, gait_plan['contact_changed']):
            forces = context['forces'].copy()
            forces[~contact] = 0.0
            solution = context.get('solution')
            return {
                'status': 'held',
                'forces': forces,
                'qp_status': solution.status.value if solution is not None else None,
                'iterations': 0,
                'solved_now': False,
            }

        cfg = self.mpc_config
        contacts = ContactSet.without_forces(self._model_feet(state, contact, feet), contact)
        model = self.tools.linearize(self.params, state.yaw, contacts, cfg.dt,
                                     com=state.position, all_legs=True)
        problem = self.tools.build_mpc(model, gait_plan['schedule'], gait_plan['reference'],
                                       cfg, state_vector(state))
        solution = self.tools.solve_qp(problem, warm_start=context.get('solution'),
                                       tol=self.config.solver.tol, max_iters=self.config.solver.max_iters)

        forces = solution.x[:12].reshape(4, 3).copy()
        status = 'success'
        if solution.status is QpStatus.PRIMAL_INFEASIBLE or not np.all(np.isfinite(forces)):
            forces = context['forces'] * self.config.solver.fallback_decay
            status = 'fallback'
            logger.warning(f"t = {t:.3f}: QP не решена ({solution.status.value}), "
                           f"прошлые силы с затуханием {self.config.solver.fallback_decay}")
        else:
            if solution.status is QpStatus.MAX_ITERS:
                status = 'max_iters'
                logger.warning(f"t = {t:.3f}: ADMM исчерпал {solution.iterations} итераций, "
                               f"невязки {solution.primal_residual:.2e} / {solution.dual_residual:.2e}")
            self.memory.update_context({'solution': solution})

        # Ноги в переносе не передают силу
        forces[~contact] = 0.0

        self.memory.update_context({'forces': forces, 'last_solve_time': t})
        self.memory.record(t, 'mpc_solve', {
            'status': status,
            'qp_status': solution.status.value,
            'iterations': solution.iterations,
            'total_fz': float(forces[:, 2].sum()),
        })
        logger.debug(f"t = {t:.3f}: MPC {status}, итераций {solution.iterations}, Σfz = {forces[:, 2].sum():.2f}")

        return {
            'status': status,
            'forces': forces.copy(),
            'qp_status': solution.status.value,
            'iterations': solution.iterations,
            'solved_now': True,
        }
