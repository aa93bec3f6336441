# src/interface/cli.py

import argparse
import logging
import os
from typing import Any, Dict, List, Optional, Sequence

import yaml
from pydantic import ValidationError

from src.agent.communicator import Communicator
from src.agent.states import GaitName, QpStatus
from src.config import settings
from src.models.control import GaitSchedule
from src.models.errors import ConfigError, QpInputError, SimulationError
from src.models.scenario import RunConfig
from src.simulation.harness import run_batch, run_hopper
from src.tools.data_loader import DataLoader
from src.tools.gait_scheduler import GaitScheduler
from src.tools.qp_solver import AdmmQpSolver
from src.tools.report_generator import ReportGenerator

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_FAILURE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='quadmpc',
        description="Симуляция четвероногого робота с MPC по силам реакции опоры, прыгуна SLIP и решателя QP",
    )
    commands = parser.add_subparsers(dest='command', required=True)

    run = commands.add_parser('run', help="прогон сценариев четвероногого робота → log.csv, metrics.yaml")
    run.add_argument('--scenario', action='append', required=True, metavar='PATH',
                     help="файл сценария YAML (можно указать несколько раз)")
    run.add_argument('--workers', type=int, default=1, metavar='N',
                     help="число процессов для независимых сценариев")
    _add_common(run)

    hopper = commands.add_parser('hopper', help="прогон прыгуна SLIP → log.csv, hops.csv, metrics.yaml")
    hopper.add_argument('--scenario', metavar='PATH', help="файл сценария прыгуна YAML (иначе значения по умолчанию)")
    _add_common(hopper)

    qp = commands.add_parser('qp', help="решение QP из текстового файла, печать решения и невязок ККТ")
    qp.add_argument('--scenario', required=True, metavar='PATH', help="файл QP: строка 'n m', затем H, g, C, l, u")
    qp.add_argument('--tol', type=float, default=settings.QP_TOL, help="порог невязок ADMM")
    qp.add_argument('--max-iters', type=int, default=settings.QP_MAX_ITERS, help="предел итераций ADMM")
    qp.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                    help="переопределение ключа конфигурации запуска")
    qp.add_argument('--dump-config', action='store_true', help="напечатать разрешенную конфигурацию и выйти")

    commands.add_parser('gaits', help="таблицы контактов встроенных походок на один цикл")
    return parser


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument('--out', default='runs', metavar='DIR', help="каталог результатов")
    parser.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                        help="переопределение ключа, например scenario.duration=2 (можно несколько раз)")
    parser.add_argument('--dump-config', action='store_true', help="напечатать разрешенную конфигурацию и выйти")
    parser.add_argument('--plots', action='store_true', help="сохранить графики PNG")
    parser.add_argument('--seed', type=int, default=0, help="зерно для рандомизированных проверок")


def _run_directories(out: str, names: Sequence[str]) -> List[str]:
    """Каталог на сценарий; повторяющиеся имена получают суффикс"""
    directories = []
    seen: Dict[str, int] = {}
    for name in names:
        count = seen.get(name, 0)
        seen[name] = count + 1
        directories.append(os.path.join(out, name if count == 0 else f"{name}_{count}"))
    return directories


def cmd_run(args: argparse.Namespace, loader: DataLoader, reports: ReportGenerator,
            communicator: Communicator) -> int:
    configs: List[RunConfig] = [
        loader.load_run_config('quad', path, out=args.out, overrides=args.overrides, workers=args.workers,
                               plots=args.plots, seed=args.seed)
        for path in args.scenario
    ]
    if args.dump_config:
        communicator.say('---\n'.join(loader.dump_config(config) for config in configs))
        return EXIT_OK

    directories = _run_directories(args.out, [config.scenario.name for config in configs])
    try:
        results = run_batch([(config.scenario, config.controller) for config in configs], workers=args.workers)
    except SimulationError as e:
        if e.log is not None:
            os.makedirs(args.out, exist_ok=True)
            reports.write_log(os.path.join(args.out, 'failed_log.csv'), e.log)
        raise

    exit_code = EXIT_OK
    for config, directory, result in zip(configs, directories, results):
        reports.write_run(directory, log=result['log'], metrics=result['metrics'], name=config.scenario.name,
                          mode='quad', plots=config.plots)
        metrics = result['metrics']
        if metrics['fall']:
            communicator.show_error(f"{config.scenario.name}: падение при t = {metrics['fall_time']:.3f} с")
            exit_code = EXIT_FAILURE
        else:
            communicator.say(f"{config.scenario.name}: успех, результаты в {directory}")
    return exit_code


def cmd_hopper(args: argparse.Namespace, loader: DataLoader, reports: ReportGenerator,
               communicator: Communicator) -> int:
    config = loader.load_run_config('hopper', args.scenario, out=args.out, overrides=args.overrides,
                                    plots=args.plots, seed=args.seed)
    if args.dump_config:
        communicator.say(loader.dump_config(config))
        return EXIT_OK

    result = run_hopper(config.hopper)
    directory = os.path.join(args.out, 'hopper')
    reports.write_run(directory, log=result['log'], metrics=result['metrics'], name='hopper', mode='hopper',
                      plots=config.plots, extra_tables={'hops': result['hops']})
    metrics = result['metrics']
    if result['status'] != 'success':
        communicator.show_error(f"прыгун упал после {metrics['hops']} прыжков")
        return EXIT_FAILURE
    communicator.say(f"прыгун: {metrics['hops']} прыжков, средняя скорость "
                     f"{metrics['mean_stride_speed_last5']:.3f} м/с, результаты в {directory}")
    return EXIT_OK


def cmd_qp(args: argparse.Namespace, loader: DataLoader, communicator: Communicator) -> int:
    config = loader.load_run_config('qp-bench', args.scenario, overrides=args.overrides)
    if args.dump_config:
        communicator.say(loader.dump_config(config))
        return EXIT_OK

    problem = loader.load_qp(config.scenario_path)
    solver = AdmmQpSolver()
    solution = solver.solve(problem, tol=args.tol, max_iters=args.max_iters)
    residuals = solver.kkt_residuals(problem, solution)

    report: Dict[str, Any] = {
        'status': solution.status.value,
        'iterations': solution.iterations,
        'objective': float(solution.objective),
        'x': [float(v) for v in solution.x],
        'y': [float(v) for v in solution.y],
        'kkt': residuals,
    }
    communicator.say(yaml.safe_dump(report, sort_keys=False, allow_unicode=True).rstrip())

    if solution.status is QpStatus.PRIMAL_INFEASIBLE:
        communicator.show_error("задача QP недопустима")
        return EXIT_FAILURE
    if solution.status is QpStatus.MAX_ITERS:
        communicator.show_warning(f"исчерпан предел {args.max_iters} итераций")
    return EXIT_OK


def cmd_gaits(communicator: Communicator) -> int:
    scheduler = GaitScheduler()
    for name in GaitName:
        gait = GaitSchedule.from_name(name.value)
        groups = scheduler.virtual_leg_groups(gait)
        pairing = ', '.join('+'.join(settings.LEG_NAMES[leg] for leg in group.members) for group in groups)
        communicator.say(f"{name.value}: T = {gait.period:g} с, d = {gait.duty:g}, виртуальные ноги: {pairing}")
        for leg_name, row in scheduler.format_cycle(gait):
            communicator.say(f"  {leg_name}  {row}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None, communicator: Optional[Communicator] = None) -> int:
    """Точка входа CLI

    Returns:
        код выхода: 0 успех, 1 ошибка конфигурации, 2 отказ симуляции (падение, недопустимая QP)
    """
    communicator = communicator or Communicator()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG

    loader = DataLoader()
    reports = ReportGenerator()

    try:
        if args.command == 'run':
            return cmd_run(args, loader, reports, communicator)
        if args.command == 'hopper':
            return cmd_hopper(args, loader, reports, communicator)
        if args.command == 'qp':
            return cmd_qp(args, loader, communicator)
        return cmd_gaits(communicator)

    except ValidationError as e:
        logger.error(f"Некорректная конфигурация: {e}")
        communicator.show_error(f"некорректная конфигурация:\n{e}")
        return EXIT_CONFIG
    except (ConfigError, QpInputError, yaml.YAMLError, OSError) as e:
        logger.error(f"Ошибка конфигурации: {e}")
        communicator.show_error(str(e))
        return EXIT_CONFIG
    except SimulationError as e:
        logger.error(f"Отказ симуляции при t = {e.time:.3f}: {e}")
        communicator.show_error(f"отказ симуляции при t = {e.time:.3f} с: {e}")
        return EXIT_FAILURE
