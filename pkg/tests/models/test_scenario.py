# tests/models/test_scenario.py

import pytest
from pydantic import ValidationError

from src.agent.states import GaitName
from src.models.scenario import HopperScenario, QuadConfig, RunConfig, Scenario


def make_scenario(**overrides):
    data = {
        'name': 'walk',
        'duration': 10.0,
        'gait': {'name': 'trot'},
        'segments': [{'start': 0.0}, {'start': 2.0, 'vx': 0.5}],
    }
    data.update(overrides)
    return Scenario.model_validate(data)


def test_commands_follow_segments():
    scenario = make_scenario()
    assert scenario.gait.name is GaitName.TROT
    assert scenario.twist_at(1.999).vx == 0.0
    assert scenario.twist_at(2.0).vx == 0.5
    assert scenario.twist_at(9.9).vx == 0.5
    assert scenario.segment_bounds() == [(0.0, 2.0), (2.0, 10.0)]


def test_unknown_key_is_rejected():
    with pytest.raises(ValidationError) as error:
        make_scenario(gait={'name': 'trot', 'speed': 2})
    assert 'speed' in str(error.value)


def test_out_of_order_segment_is_named():
    with pytest.raises(ValidationError) as error:
        make_scenario(segments=[{'start': 1.0}, {'start': 0.5}])
    assert 'segments[1].start' in str(error.value)


def test_events_after_duration_are_rejected():
    with pytest.raises(ValidationError, match='segments\\[1\\].start'):
        make_scenario(duration=1.5)
    with pytest.raises(ValidationError, match='disturbances\\[0\\].time'):
        make_scenario(disturbances=[{'time': 12.0, 'impulse': [0.0, 4.5, 0.0]}])


def test_unknown_gait_is_rejected():
    with pytest.raises(ValidationError):
        make_scenario(gait={'name': 'gallop'})


def test_run_config_requires_mode_section():
    with pytest.raises(ValidationError, match='scenario'):
        RunConfig.model_validate({'mode': 'quad'})
    with pytest.raises(ValidationError, match='scenario_path'):
        RunConfig.model_validate({'mode': 'qp-bench'})
    config = RunConfig.model_validate({'mode': 'hopper', 'hopper': {}})
    assert config.hopper == HopperScenario()


def test_controller_limits():
    with pytest.raises(ValidationError):
        QuadConfig.model_validate({'mpc': {'state_weights': [1.0] * 12}})
    with pytest.raises(ValidationError):
        QuadConfig.model_validate({'sim': {'control_dt': 0.02}})
    cfg = QuadConfig.model_validate({'mpc': {'horizon': 6}}).mpc.to_config()
    assert cfg.horizon == 6


def test_hopper_scenario_passes_speed_integral_gain():
    assert HopperScenario(speed_integral_gain=0.02).params().speed_integral_gain == 0.02
    assert HopperScenario(speed_integral_gain=0.0).params().speed_integral_gain == 0.0
    with pytest.raises(ValidationError):
        HopperScenario(speed_integral_gain=-0.01)
