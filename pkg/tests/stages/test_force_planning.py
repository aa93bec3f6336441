# tests/stages/test_force_planning.py

import numpy as np
import pytest

from src.agent.base import LocomotionController
from src.agent.states import QpStatus
from src.models.control import FootFeedback, GaitSchedule, TwistCommand
from src.models.mpc import QpSolution
from src.models.robot import BodyParams, RobotState
from src.tools.foot_planner import FootPlanner


@pytest.fixture
def setup():
    state = RobotState.at_rest()
    feet = FootPlanner().nominal_footholds(state.position, state.rotation, BodyParams.default().hip_offsets)
    return LocomotionController(), state, FootFeedback(feet), GaitSchedule.from_name('stand')


def test_forces_are_held_between_solves(setup):
    controller, state, feet, gait = setup
    first = controller.control_tick(state, gait, TwistCommand(), 0.0, feet)
    held = controller.control_tick(state, gait, TwistCommand(), 0.001, feet)

    assert held.diagnostics['force_status'] == 'held'
    assert not held.diagnostics['solved_now']
    assert held.diagnostics['qp_iterations'] == 0
    assert np.array_equal(held.forces, first.forces)

    resolved = controller.control_tick(state, gait, TwistCommand(), 0.025, feet)
    assert resolved.diagnostics['solved_now']
    assert len(controller.memory.get_history('mpc_solve')) == 2


def test_infeasible_solve_decays_previous_forces(setup, monkeypatch):
    controller, state, feet, gait = setup
    first = controller.control_tick(state, gait, TwistCommand(), 0.0, feet)
    warm = controller.memory.get_context()['solution']

    def infeasible(problem, warm_start=None, tol=None, max_iters=None):
        return QpSolution(x=np.full(problem.n_vars, np.nan), y=np.zeros(problem.n_constraints),
                          objective=np.nan, iterations=7, status=QpStatus.PRIMAL_INFEASIBLE,
                          primal_residual=1.0, dual_residual=1.0)

    monkeypatch.setattr(controller.tools, 'solve_qp', infeasible)
    output = controller.control_tick(state, gait, TwistCommand(), 0.025, feet)

    assert output.status == 'fallback'
    assert output.diagnostics['qp_status'] == 'primal_infeasible'
    assert np.allclose(output.forces, 0.9 * first.forces)
    # Теплый старт не портится недопустимым решением
    assert controller.memory.get_context()['solution'] is warm
