# src/agent/states.py

from enum import Enum


class LegMode(Enum):
    SWING = "swing"
    STANCE = "stance"


class QpStatus(Enum):
    SOLVED = "solved"
    MAX_ITERS = "max_iters"
    PRIMAL_INFEASIBLE = "primal_infeasible"


class HopperPhase(Enum):
    FLIGHT = "flight"
    COMPRESSION = "compression"
    THRUST = "thrust"


class GaitName(Enum):
    STAND = "stand"
    TROT = "trot"
    PACE = "pace"
    BOUND = "bound"
    PRONK = "pronk"


class ControllerState(Enum):
    IDLE = "idle"
    GAIT_PLANNING = "gait_planning"
    FORCE_PLANNING = "force_planning"
    SWING_CONTROL = "swing_control"
    STANCE_CONTROL = "stance_control"  # последний этап тика
