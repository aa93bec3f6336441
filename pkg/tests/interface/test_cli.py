# tests/interface/test_cli.py

import io
from pathlib import Path

import pytest
import yaml

from src.agent.communicator import Communicator
from src.interface.cli import EXIT_CONFIG, EXIT_FAILURE, EXIT_OK, main
from src.tools.data_loader import DataLoader

SCENARIOS = Path(__file__).resolve().parents[2] / 'scenarios'


@pytest.fixture
def communicator():
    return Communicator(stream=io.StringIO(), error_stream=io.StringIO())


def output(communicator: Communicator) -> str:
    return communicator.stream.getvalue()


def errors(communicator: Communicator) -> str:
    return communicator.error_stream.getvalue()


def test_gait_tables(communicator):
    assert main(['gaits'], communicator) == EXIT_OK
    text = output(communicator)
    assert 'trot: T = 0.4 с, d = 0.5, виртуальные ноги: FL+RR, FR+RL' in text
    assert '  FL  ' in text


def test_qp_example(communicator):
    assert main(['qp', '--scenario', str(SCENARIOS / 'qp' / 'example.qp')], communicator) == EXIT_OK
    report = yaml.safe_load(output(communicator))
    assert report['status'] == 'solved'
    assert report['x'] == pytest.approx([0.3, 0.7], abs=1e-4)
    assert report['kkt']['stationarity'] < 1e-4


def test_infeasible_qp(communicator, tmp_path):
    path = tmp_path / 'bad.qp'
    path.write_text("1 2\n1\n0\n1\n1\n1 -inf\ninf 0\n", encoding='utf-8')
    assert main(['qp', '--scenario', str(path)], communicator) == EXIT_FAILURE
    assert 'Ошибка' in errors(communicator)


def test_malformed_segments(communicator, tmp_path):
    path = tmp_path / 'bad.yaml'
    path.write_text("duration: 2\nsegments:\n  - start: 1.0\n  - start: 0.5\n", encoding='utf-8')
    assert main(['run', '--scenario', str(path), '--out', str(tmp_path)], communicator) == EXIT_CONFIG
    assert 'segments[1].start' in errors(communicator)


def test_bad_override(communicator):
    code = main(['run', '--scenario', str(SCENARIOS / 'stand.yaml'), '--set', 'duration'], communicator)
    assert code == EXIT_CONFIG


def test_missing_file(communicator, tmp_path):
    assert main(['run', '--scenario', str(tmp_path / 'absent.yaml')], communicator) == EXIT_CONFIG


def test_usage_errors():
    assert main(['--help']) == EXIT_OK
    assert main(['run']) == EXIT_CONFIG


def test_dump_config_reparses(communicator, tmp_path):
    path = str(SCENARIOS / 'trot_push.yaml')
    assert main(['run', '--scenario', path, '--out', str(tmp_path), '--dump-config'], communicator) == EXIT_OK

    loader = DataLoader()
    assert loader.parse_config(output(communicator)) == loader.load_run_config('quad', path, out=str(tmp_path))


def test_short_stand_run(communicator, tmp_path):
    argv = ['run', '--scenario', str(SCENARIOS / 'stand.yaml'), '--out', str(tmp_path),
            '--set', 'scenario.duration=0.3']
    assert main(argv, communicator) == EXIT_OK

    run_dir = tmp_path / 'stand'
    assert (run_dir / 'log.csv').exists()
    assert (run_dir / 'summary.md').exists()
    metrics = yaml.safe_load((run_dir / 'metrics.yaml').read_text(encoding='utf-8'))
    assert metrics['fall'] is False
    assert metrics['ticks'] == 300


def test_hopper_defaults(communicator, tmp_path):
    argv = ['hopper', '--out', str(tmp_path), '--set', 'hopper.duration=1.0']
    assert main(argv, communicator) == EXIT_OK
    assert (tmp_path / 'hopper' / 'hops.csv').exists()
    assert 'прыгун' in output(communicator)
