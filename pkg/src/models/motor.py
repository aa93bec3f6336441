# src/models/motor.py

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PhaseCurrents:
    """Фазные величины a, b, c (токи или напряжения)"""
    a: float
    b: float
    c: float

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c])


@dataclass(frozen=True)
class DqCurrents:
    """Величины во вращающейся системе ротора"""
    d: float
    q: float
    zero: float = 0.0
    theta: float = 0.0   # электрический угол ротора, рад

    def as_array(self) -> np.ndarray:
        return np.array([self.d, self.q, self.zero])


@dataclass(frozen=True)
class PiGains:
    kp: float
    ki: float
    dt: float
    voltage_limit: float


@dataclass(frozen=True)
class PiState:
    """Интеграторы ПИ-регуляторов осей d и q"""
    integral_d: float = 0.0
    integral_q: float = 0.0


@dataclass(frozen=True)
class RlAxis:
    """Ось d или q двигателя как RL-цепь (без противо-ЭДС)"""
    resistance: float
    inductance: float

    @property
    def time_constant(self) -> float:
        return self.inductance / self.resistance
