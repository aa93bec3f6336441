# tests/tools/test_slip_hopper.py

import numpy as np
import pytest

from src.agent.states import HopperPhase
from src.models.errors import StepSizeError
from src.models.hopper import HopperParams, HopperState
from src.tools.slip_hopper import SlipHopper

G = 9.81


def lossless():
    params = HopperParams(leg_damping=0.0, servos_on=False)
    return params, SlipHopper(params)


def test_first_touchdown_time_is_ballistic():
    params, hopper = lossless()
    state = HopperState.dropped(0.1, params=params, thrust=0.0)

    while state.hop_count == 0:
        state = hopper.step_hybrid(state, 5e-4)

    assert state.phase is HopperPhase.COMPRESSION
    assert state.touchdown_time == pytest.approx(np.sqrt(2 * 0.1 / G), abs=1e-6)
    assert state.foot_x == pytest.approx(0.0, abs=1e-12)


def test_phase_sequence_repeats():
    params, hopper = lossless()
    result = hopper.simulate(HopperState.dropped(0.1, params=params, thrust=0.0), duration=1.5, dt=5e-4)

    phases = result['phases']
    assert phases[:7] == ['flight', 'compression', 'thrust', 'flight', 'compression', 'thrust', 'flight']
    assert result['status'] == 'success'


def test_energy_is_conserved_without_losses():
    params, hopper = lossless()
    state = HopperState.dropped(0.15, params=params, thrust=0.0)
    result = hopper.simulate(state, duration=3.0, dt=5e-4)
    initial = hopper.energy(state)

    energies = np.array([hopper.energy(s) for s in result['states']])
    assert len(result['hops']) >= 4
    assert np.max(np.abs(energies - initial)) < 1e-3 * initial


def test_apex_decays_with_damping_and_no_thrust():
    params = HopperParams(leg_damping=20.0, servos_on=False)
    hopper = SlipHopper(params)
    result = hopper.simulate(HopperState.dropped(0.15, params=params, thrust=0.0), duration=4.0, dt=5e-4)

    apexes = [hop['apex'] for hop in result['hops'][1:]]
    assert len(apexes) >= 3
    assert all(later < earlier for earlier, later in zip(apexes, apexes[1:]))
    assert apexes[0] < 0.5 + 0.15


def test_step_size_is_validated():
    _, hopper = lossless()
    with pytest.raises(StepSizeError):
        hopper.step_hybrid(HopperState.dropped(0.1), 1e-3)


def test_flight_control_targets_neutral_point():
    hopper = SlipHopper(HopperParams(speed_gain=0.0))
    state = HopperState.dropped(0.1, speed=1.0).evolve(stance_estimate=0.2)
    target = hopper.flight_control(state, speed_ref=1.0)
    assert target == pytest.approx(-np.arcsin(0.1 / 0.5))


def test_flight_control_clamps_large_offsets(caplog):
    hopper = SlipHopper()
    state = HopperState.dropped(0.1, speed=20.0).evolve(stance_estimate=0.2)
    with caplog.at_level('WARNING'):
        target = hopper.flight_control(state, speed_ref=0.0)
    assert target == pytest.approx(-np.pi / 2)
    assert caplog.records


def test_stance_control_uses_attitude_and_thrust():
    hopper = SlipHopper(HopperParams(attitude_kp=100.0, attitude_kd=10.0))
    state = HopperState.dropped(0.0).evolve(phase=HopperPhase.THRUST, pitch=0.1, pitch_rate=-0.5)
    torque, thrust = hopper.stance_control(state)
    assert torque == pytest.approx(100.0 * 0.1 - 10.0 * 0.5)
    assert thrust == state.thrust


def test_neutral_point_keeps_speed():
    params = HopperParams(speed_gain=0.0, speed_integral_gain=0.0)
    hopper = SlipHopper(params)
    state = HopperState.dropped(0.1, speed=0.5, params=params, spring=40000.0, thrust=0.0)
    result = hopper.simulate(state, duration=2.0, dt=5e-4, max_hops=5)

    speeds = hopper.stride_speeds(result['hops'])
    assert len(speeds) >= 3
    assert np.all(np.abs(speeds[:3] - 0.5) < 0.1)


@pytest.mark.slow
def test_speed_regulation_from_rest():
    params = HopperParams()
    hopper = SlipHopper(params)
    result = hopper.simulate(HopperState.dropped(0.1, params=params), duration=20.0, dt=5e-4,
                             speed_ref=1.0, max_hops=30)

    assert result['status'] == 'success'
    speeds = hopper.stride_speeds(result['hops'])
    assert 0.85 <= float(np.mean(speeds[-5:])) <= 1.15


def test_lossless_apex_returns_to_drop_height():
    params, hopper = lossless()
    result = hopper.simulate(HopperState.dropped(0.15, params=params, thrust=0.0), duration=3.0, dt=5e-4)

    apexes = [hop['apex'] for hop in result['hops'][1:]]
    assert len(apexes) >= 3
    assert np.allclose(apexes, 0.5 + 0.15, atol=2e-3)


def test_flight_foot_height_is_not_negative():
    state = HopperState.dropped(0.0).evolve(z=0.49)
    assert state.foot_height == 0.0
    assert state.evolve(phase=HopperPhase.THRUST).foot_height == pytest.approx(-0.01)


def test_damped_liftoff_keeps_foot_above_ground():
    params = HopperParams(leg_damping=20.0, servos_on=False)
    hopper = SlipHopper(params)
    result = hopper.simulate(HopperState.dropped(0.15, params=params, thrust=0.0), duration=2.0, dt=5e-4)

    flights = [s for s in result['states'] if s.in_flight]
    assert len(result['hops']) >= 2
    assert min(s.foot_height for s in flights) >= 0.0


def test_flight_control_adds_speed_integral():
    hopper = SlipHopper(HopperParams(speed_gain=0.0, speed_integral_gain=0.01))
    state = HopperState.dropped(0.1, speed=1.0).evolve(stance_estimate=0.2, speed_integral=-2.0)
    target = hopper.flight_control(state, speed_ref=1.0)
    assert target == pytest.approx(-np.arcsin((0.1 - 0.02) / 0.5))


def test_speed_integral_accumulates_stride_error():
    params = HopperParams(speed_gain=0.0, speed_integral_gain=0.01)
    hopper = SlipHopper(params)
    state = HopperState.dropped(0.1, speed=0.5, params=params, spring=40000.0, thrust=0.0)
    result = hopper.simulate(state, duration=2.0, dt=5e-4, speed_ref=0.6, max_hops=4)

    speeds = hopper.stride_speeds(result['hops'])
    final = result['states'][-1]
    assert len(speeds) == 3
    assert final.speed_integral == pytest.approx(float(np.sum(speeds - 0.6)), abs=1e-9)
    assert final.speed_integral < 0.0
