# tests/tools/test_motor_foc.py

import numpy as np
import pytest

from src.models.motor import DqCurrents, PhaseCurrents, PiGains, PiState, RlAxis
from src.tools.motor_foc import FocCurrentLoop


@pytest.fixture
def foc():
    return FocCurrentLoop()


def test_dq0_round_trip(foc):
    rng = np.random.default_rng(12)
    for _ in range(100):
        abc = PhaseCurrents(*rng.normal(size=3))
        theta = rng.uniform(-10, 10)
        back = foc.inverse_dq0(foc.dq0_transform(abc, theta))
        assert np.allclose(back.as_array(), abc.as_array(), atol=1e-12)


def test_balanced_currents_are_constant_in_rotor_frame(foc):
    amplitude, phase = 3.0, 0.4
    values = []
    for theta in np.linspace(0.0, 4 * np.pi, 200):
        abc = PhaseCurrents(
            a=amplitude * np.cos(theta + phase),
            b=amplitude * np.cos(theta + phase - 2 * np.pi / 3),
            c=amplitude * np.cos(theta + phase + 2 * np.pi / 3),
        )
        dq = foc.dq0_transform(abc, theta)
        values.append((dq.d, dq.q, dq.zero))

    values = np.array(values)
    assert np.ptp(values, axis=0).max() < 1e-9
    assert values[0, 0] == pytest.approx(amplitude * np.cos(phase))
    assert values[0, 1] == pytest.approx(amplitude * np.sin(phase))
    assert values[0, 2] == pytest.approx(0.0, abs=1e-12)


def test_power_is_invariant(foc):
    rng = np.random.default_rng(13)
    for _ in range(20):
        theta = rng.uniform(0, 2 * np.pi)
        voltages = PhaseCurrents(*rng.normal(size=3))
        currents = PhaseCurrents(*rng.normal(size=3))
        p_dq = foc.power_dq0(foc.dq0_transform(voltages, theta), foc.dq0_transform(currents, theta))
        assert p_dq == pytest.approx(foc.power_abc(voltages, currents))


def test_step_response_rise_time(foc):
    axis = RlAxis(resistance=0.5, inductance=1e-3)
    bandwidth = 1000.0
    gains = foc.bandwidth_gains(axis, bandwidth, dt=5e-5)
    response = foc.step_response(DqCurrents(d=0.0, q=1.0), axis, gains, duration=0.02)

    q = response['currents'][:, 1]
    crossing = response['time'][np.argmax(q >= 0.9)]
    assert crossing == pytest.approx(foc.rise_time(bandwidth), rel=0.1)
    assert q[-1] == pytest.approx(1.0, abs=1e-3)
    assert np.allclose(response['currents'][:, 0], 0.0)


def test_integrator_is_limited(foc):
    gains = PiGains(kp=1.0, ki=1000.0, dt=1e-4, voltage_limit=5.0)
    state = PiState()
    measured = DqCurrents(d=0.0, q=0.0)
    for _ in range(1000):
        command, state = foc.pi_current_step(DqCurrents(d=0.0, q=100.0), measured, gains, state)

    assert state.integral_q == pytest.approx(5.0)
    assert command.q == pytest.approx(5.0)

    # после снятия задания выход уходит из насыщения за один такт
    command, state = foc.pi_current_step(DqCurrents(d=0.0, q=0.0), DqCurrents(d=0.0, q=10.0), gains, state)
    assert command.q < 5.0


def test_bandwidth_gains():
    axis = RlAxis(resistance=0.2, inductance=5e-4)
    gains = FocCurrentLoop.bandwidth_gains(axis, 2000.0)
    assert gains.kp == pytest.approx(1.0)
    assert gains.ki == pytest.approx(400.0)
    with pytest.raises(ValueError):
        FocCurrentLoop.bandwidth_gains(axis, 0.0)
