# tests/agent/test_memory.py

import numpy as np

from src.agent.memory import ControllerMemory


def test_history_keeps_latest_events_within_limit():
    memory = ControllerMemory(history_limit=3)
    for tick in range(5):
        memory.record(tick * 0.001, 'mpc_solve' if tick % 2 == 0 else 'touchdown', {'tick': tick})

    history = memory.get_history()
    assert [entry['data']['tick'] for entry in history] == [2, 3, 4]
    assert [entry['time'] for entry in memory.get_history('mpc_solve')] == [0.002, 0.004]


def test_unbounded_history_and_reset():
    memory = ControllerMemory(history_limit=None)
    for tick in range(20):
        memory.record(float(tick), 'mpc_solve', {})
    assert len(memory.get_history()) == 20

    memory.update_context({'forces': np.ones((4, 3))})
    memory.clear_session()

    assert memory.get_history() == []
    assert np.all(memory.get_context()['forces'] == 0.0)
