# src/tools/linearization.py

import logging
from dataclasses import replace
from typing import Optional

import numpy as np
from scipy.linalg import expm
from scipy.spatial.transform import Rotation

from src.config import settings
from src.models.errors import NoContactError, StepSizeError
from src.models.mpc import GRAVITY_STATE, OMEGA, POS, STATE_DIM, THETA, VEL, LinearModel
from src.models.robot import BodyParams, ContactSet
from .rigid_body import skew

logger = logging.getLogger(__name__)


def yaw_rotation(yaw: float) -> np.ndarray:
    return Rotation.from_euler('z', yaw).as_matrix()


class Linearizer:
    """Линейная модель корпуса при нулевых крене и тангаже

    Состояние (Θ, p, ω, ṗ, 1): в записи исходной модели p̂ встречается дважды,
    последний блок трактуется как линейная скорость. Гироскопический член
    ω×(Iω) отброшен (малые ω), как и зависимость момента от смещения p.
    """

    def build_continuous(self, params: BodyParams, yaw: float, feet: ContactSet,
                         com: Optional[np.ndarray] = None, all_legs: bool = False) -> LinearModel:
        """Непрерывная модель ẋ = A_c·x + B_c·u

        Args:
            params: параметры корпуса
            yaw: текущее рыскание ψ
            feet: положения стоп и флаги контакта
            com: положение ЦМ; None - стопы уже заданы относительно ЦМ
            all_legs: включить все четыре ноги (ноги в переносе с плановыми точками)

        Returns:
            LinearModel: только непрерывная часть
        """
        legs = tuple(range(4)) if all_legs else tuple(int(i) for i in feet.contact_legs)
        if not legs:
            raise NoContactError("Нет ног в контакте: у линейной модели нет входов")

        offset = np.zeros(3) if com is None else np.asarray(com, dtype=float)
        lever = feet.foot_positions[list(legs)] - offset

        rz = yaw_rotation(yaw)
        inertia_inv = np.linalg.inv(rz @ params.inertia @ rz.T)

        a_c = np.zeros((STATE_DIM, STATE_DIM))
        # Блок Θ̇ = R_z(ψ)·ω в исходной записи
        a_c[THETA, OMEGA] = rz
        a_c[POS, VEL] = np.eye(3)
        a_c[VEL, GRAVITY_STATE] = -params.gravity

        b_c = np.zeros((STATE_DIM, 3 * len(legs)))
        for column, r in enumerate(lever):
            block = slice(3 * column, 3 * column + 3)
            b_c[OMEGA, block] = inertia_inv @ skew(r)
            b_c[VEL, block] = np.eye(3) / params.mass

        logger.debug(f"Линеаризация: ψ = {yaw:.4f}, ноги {legs}")
        return LinearModel(a_c=a_c, b_c=b_c, yaw=float(yaw), foot_vectors=lever, leg_indices=legs)

    def discretize(self, model: LinearModel, dt: float) -> LinearModel:
        """Точная дискретизация с фиксатором нулевого порядка

        Â и B̂ берутся из одной экспоненты расширенной матрицы [[A_c, B_c], [0, 0]]·dt.
        """
        if not 0.0 < dt <= settings.MAX_DISCRETIZE_DT:
            raise StepSizeError(f"Шаг дискретизации {dt} вне (0, {settings.MAX_DISCRETIZE_DT}]")

        n_inputs = model.b_c.shape[1]
        augmented = np.zeros((STATE_DIM + n_inputs, STATE_DIM + n_inputs))
        augmented[:STATE_DIM, :STATE_DIM] = model.a_c * dt
        augmented[:STATE_DIM, STATE_DIM:] = model.b_c * dt
        exponential = expm(augmented)

        return replace(
            model,
            a_d=exponential[:STATE_DIM, :STATE_DIM],
            b_d=exponential[:STATE_DIM, STATE_DIM:],
            dt=float(dt),
        )

    def linearize(self, params: BodyParams, yaw: float, feet: ContactSet, dt: float,
                  com: Optional[np.ndarray] = None, all_legs: bool = False) -> LinearModel:
        return self.discretize(self.build_continuous(params, yaw, feet, com, all_legs), dt)
