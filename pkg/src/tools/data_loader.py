# src/tools/data_loader.py

import copy
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import yaml

from src.models.errors import ConfigError
from src.models.mpc import QpProblem
from src.models.scenario import RunConfig

logger = logging.getLogger(__name__)


class DataLoader:
    """Инструмент для загрузки сценариев, конфигураций и задач QP из файлов"""

    def load_yaml(self, path: str) -> Dict[str, Any]:
        """Чтение YAML-документа; верхний уровень должен быть словарем"""
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f)
        if data is None:
            return {}
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: ожидался словарь на верхнем уровне, получено {type(data).__name__}")
        return data

    @staticmethod
    def apply_overrides(raw: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
        """Применение переопределений вида key.sub=value к сырому словарю

        Значение разбирается как YAML, поэтому числа, списки и логические значения
        получают свой тип.
        """
        result = copy.deepcopy(raw)
        for item in overrides:
            key, sep, value = item.partition('=')
            if not sep or not key.strip():
                raise ConfigError(f"Переопределение '{item}' должно иметь вид key=value")

            parts = key.strip().split('.')
            node = result
            for depth, part in enumerate(parts[:-1]):
                child = node.get(part)
                if child is None:
                    child = node[part] = {}
                if not isinstance(child, dict):
                    raise ConfigError(f"Переопределение '{item}': '{'.'.join(parts[:depth + 1])}' не раздел")
                node = child
            try:
                node[parts[-1]] = yaml.safe_load(value)
            except yaml.YAMLError as e:
                raise ConfigError(f"Переопределение '{item}': значение не разобрано ({e})") from e
            logger.debug(f"Переопределено {key} = {node[parts[-1]]!r}")
        return result

    def load_run_config(self, mode: str, scenario_path: Optional[str] = None, out: str = "runs",
                        overrides: Sequence[str] = (), workers: int = 1, plots: bool = False,
                        seed: int = 0) -> RunConfig:
        """Сборка RunConfig из файла сценария и флагов CLI

        Раздел controller файла сценария уходит в настройки контроллера,
        остальные ключи - в сценарий (quad) или в сценарий прыгуна (hopper).
        Переопределения адресуют ключи от корня RunConfig: scenario.duration=2,
        controller.mpc.horizon=8.
        """
        raw: Dict[str, Any] = {
            'mode': mode,
            'scenario_path': scenario_path,
            'out': out,
            'overrides': list(overrides),
            'seed': seed,
            'workers': workers,
            'plots': plots,
        }

        if scenario_path is not None and mode in ('quad', 'hopper'):
            document = self.load_yaml(scenario_path)
            controller = document.pop('controller', None)
            if controller is not None:
                raw['controller'] = controller
            raw['scenario' if mode == 'quad' else 'hopper'] = document
        elif mode == 'hopper':
            # Прыгун без файла: все параметры по умолчанию, правка через --set hopper.*
            raw['hopper'] = {}

        raw = self.apply_overrides(raw, overrides)
        return RunConfig.model_validate(raw)

    @staticmethod
    def dump_config(config: RunConfig) -> str:
        """YAML полностью разрешенной конфигурации; повторный разбор дает равную модель"""
        return yaml.safe_dump(config.model_dump(mode='json'), sort_keys=False, allow_unicode=True)

    @staticmethod
    def parse_config(text: str) -> RunConfig:
        return RunConfig.model_validate(yaml.safe_load(text))

    # ------------------------------------------------------------------ QP в текстовом формате

    @staticmethod
    def _tokens(text: str) -> List[str]:
        tokens: List[str] = []
        for line in text.splitlines():
            line = line.split('#', 1)[0]
            tokens.extend(line.split())
        return tokens

    def load_qp(self, path: str) -> QpProblem:
        """Чтение QP: строка размеров "n m", затем H (n×n), g (n), C (m×n), l (m), u (m)

        Элементы по строкам, разделитель - пробелы; допустимы inf и -inf,
        комментарии начинаются с '#'.
        """
        tokens = self._tokens(Path(path).read_text(encoding='utf-8'))
        if len(tokens) < 2:
            raise ConfigError(f"{path}: нет строки размеров 'n m'")
        try:
            n, m = int(tokens[0]), int(tokens[1])
            values = np.array([float(token) for token in tokens[2:]])
        except ValueError as e:
            raise ConfigError(f"{path}: некорректное число ({e})") from e
        if n < 1 or m < 0:
            raise ConfigError(f"{path}: недопустимые размеры n = {n}, m = {m}")

        expected = n * n + n + m * n + 2 * m
        if values.size != expected:
            raise ConfigError(f"{path}: ожидалось {expected} чисел после размеров, получено {values.size}")

        offset = 0

        def take(count: int) -> np.ndarray:
            nonlocal offset
            block = values[offset:offset + count]
            offset += count
            return block

        h = take(n * n).reshape(n, n)
        g = take(n)
        c = take(m * n).reshape(m, n)
        lower = take(m)
        upper = take(m)
        return QpProblem(h=h, g=g, c=c, l=lower, u=upper)

    @staticmethod
    def write_qp(path: str, problem: QpProblem) -> str:
        """Запись QP в тот же текстовый формат"""
        def row(values) -> str:
            return ' '.join(format(float(v), '.17g') for v in values)

        lines = [f"{problem.n_vars} {problem.n_constraints}", "# H"]
        lines.extend(row(r) for r in problem.h)
        lines.extend(["# g", row(problem.g), "# C"])
        lines.extend(row(r) for r in problem.c)
        lines.extend(["# l", row(problem.l), "# u", row(problem.u)])

        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text('\n'.join(lines) + '\n', encoding='utf-8')
        return path
