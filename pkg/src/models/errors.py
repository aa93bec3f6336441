# src/models/errors.py

from typing import Any, Optional


class QuadMpcError(Exception):
    """Базовое исключение стека управления"""


class StepSizeError(QuadMpcError, ValueError):
    """Шаг интегрирования или дискретизации вне допустимого диапазона"""


class NoContactError(QuadMpcError, ValueError):
    """Линейная модель без ног в контакте не имеет входов"""


class DimensionError(QuadMpcError, ValueError):
    """Несовпадение размерностей расписания, модели или опорной траектории"""


class QpInputError(QuadMpcError, ValueError):
    """Некорректная постановка QP (несимметричная H, l > u)"""


class PhaseRangeError(QuadMpcError, ValueError):
    """Фаза переноса вне [0, 1]"""


class ConfigError(QuadMpcError):
    """Ошибка разбора сценария или конфигурации"""


class SingularLegError(QuadMpcError):
    """Нога в кинематической сингулярности"""

    def __init__(self, det_j: float, leg: Optional[int] = None):
        self.det_j = det_j
        self.leg = leg
        super().__init__(f"Сингулярность якобиана ноги {leg}: det J = {det_j:.3e}")

    def __reduce__(self):
        return type(self), (self.det_j, self.leg)


class SimulationError(QuadMpcError):
    """Отказ контроллера во время прогона; несет журнал до момента отказа"""

    def __init__(self, message: str, log: Any = None, time: float = 0.0):
        self.log = log
        self.time = time
        super().__init__(message)

    def __reduce__(self):
        # Журнал передается между процессами вместе с исключением
        return type(self), (str(self), self.log, self.time)
