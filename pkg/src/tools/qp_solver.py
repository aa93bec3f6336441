# src/tools/qp_solver.py

import logging
from typing import Dict, Optional, Tuple, Union

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from src.agent.states import QpStatus
from src.config import settings
from src.models.errors import QpInputError
from src.models.mpc import QpProblem, QpSolution

logger = logging.getLogger(__name__)

INFEASIBILITY_TOL = 1e-4
IMPROVEMENT_RATIO = 0.999


class AdmmQpSolver:
    """Плотный ADMM для min ½UᵀHU + Uᵀg при l <= CU <= u

    Экземпляр хранит факторизацию системы ККТ и не реентерабелен.
    """

    def __init__(self, rho_scale: float = settings.QP_RHO_SCALE, alpha: float = settings.QP_ALPHA,
                 sigma: float = settings.QP_SIGMA, stall_iters: int = settings.QP_STALL_ITERS):
        self.rho_scale = rho_scale
        self.alpha = alpha
        self.sigma = sigma
        self.stall_iters = stall_iters
        self._cache = None   # (H, C, rho, factor)
        self.factorizations = 0

    @staticmethod
    def validate(problem: QpProblem):
        """Проверка постановки до итераций"""
        h = problem.h
        n = problem.n_vars
        if h.shape != (n, n):
            raise QpInputError(f"H должна быть {n}×{n}, получено {h.shape}")
        if problem.c.shape[1] != n or problem.l.shape != problem.u.shape or \
                problem.l.size != problem.c.shape[0]:
            raise QpInputError("Размеры C, l, u не согласованы")
        scale = max(1.0, float(np.max(np.abs(h))) if h.size else 1.0)
        asymmetry = float(np.max(np.abs(h - h.T))) if h.size else 0.0
        if asymmetry > 1e-9 * scale:
            raise QpInputError(f"H несимметрична: max|H − Hᵀ| = {asymmetry:.3e}")
        bad_rows = np.flatnonzero(problem.l > problem.u)
        if bad_rows.size:
            raise QpInputError(f"l > u в строках {bad_rows.tolist()}")

    def _rho_vector(self, problem: QpProblem, h: np.ndarray) -> np.ndarray:
        """ρ по строкам: база 0.1·trace(H)/n, равенства ×1e3, свободные строки ×1e-6"""
        n = problem.n_vars
        trace = float(np.trace(h))
        base = self.rho_scale * trace / n if trace > 0 else self.rho_scale
        rho = np.full(problem.n_constraints, base)

        equality = np.isclose(problem.l, problem.u, rtol=0.0, atol=1e-12)
        free = np.isneginf(problem.l) & np.isposinf(problem.u)
        rho[equality] *= settings.QP_EQUALITY_RHO_FACTOR
        rho[free] *= settings.QP_FREE_RHO_FACTOR
        return rho

    def _factor(self, h: np.ndarray, c: np.ndarray, rho: np.ndarray):
        if self._cache is not None:
            cached_h, cached_c, cached_rho, factor = self._cache
            if cached_h.shape == h.shape and cached_c.shape == c.shape and \
                    np.array_equal(cached_h, h) and np.array_equal(cached_c, c) and \
                    np.array_equal(cached_rho, rho):
                return factor

        kkt = h + self.sigma * np.eye(h.shape[0]) + (c.T * rho) @ c
        factor = cho_factor(kkt)
        self.factorizations += 1
        self._cache = (h.copy(), c.copy(), rho.copy(), factor)
        return factor

    @staticmethod
    def _cost_scale(h: np.ndarray) -> float:
        """Масштаб стоимости: плохо обусловленная по масштабу H приводится к единичной диагонали"""
        mean_diag = float(np.mean(np.diag(h))) if h.size else 0.0
        return 1.0 / mean_diag if 0.0 < mean_diag < 1.0 else 1.0

    def solve(self, problem: QpProblem,
              warm_start: Optional[Union[np.ndarray, QpSolution]] = None,
              tol: float = settings.QP_TOL,
              max_iters: int = settings.QP_MAX_ITERS) -> QpSolution:
        """Решение QP методом ADMM с перерелаксацией

        Args:
            problem: H, g, C, l, u
            warm_start: прямой вектор или предыдущее решение (прямое + двойственное)
            tol: порог для max(невязка прямая, невязка двойственная)
            max_iters: предел итераций

        Returns:
            QpSolution: лучшая итерация со статусом solved / max_iters / primal_infeasible
        """
        self.validate(problem)

        scale = self._cost_scale(problem.h)
        h = problem.h * scale
        g = problem.g * scale
        c, lower, upper = problem.c, problem.l, problem.u
        m = problem.n_constraints

        rho = self._rho_vector(problem, h)
        factor = self._factor(h, c, rho)
        x, z, y = self._initial_iterates(problem, warm_start, scale)

        primal, dual = self._residuals(h, g, c, x, z, y)
        best = (x.copy(), z.copy(), y.copy(), 0, primal, dual / scale)
        best_residual = max(primal, dual)
        stalled = 0
        y_prev = y.copy()

        for iteration in range(1, max_iters + 1):
            rhs = self.sigma * x - g + c.T @ (rho * z - y)
            x_tilde = cho_solve(factor, rhs)
            z_tilde = c @ x_tilde

            z_prev = z
            x = self.alpha * x_tilde + (1.0 - self.alpha) * x
            z_relaxed = self.alpha * z_tilde + (1.0 - self.alpha) * z_prev
            z = np.clip(z_relaxed + y / rho, lower, upper)
            y_prev = y
            y = y + rho * (z_relaxed - z)

            primal, dual = self._residuals(h, g, c, x, z, y)
            residual = max(primal, dual)

            if residual < best_residual * IMPROVEMENT_RATIO:
                stalled = 0
            else:
                stalled += 1
            if residual < best_residual:
                best_residual = residual
                best = (x.copy(), z.copy(), y.copy(), iteration, primal, dual / scale)

            if primal < tol and dual < tol:
                return self._solution(problem, x, z, y, scale, iteration, QpStatus.SOLVED,
                                      primal, dual / scale)

            if stalled >= self.stall_iters and m > 0:
                if self._primal_infeasible(c, lower, upper, y - y_prev):
                    logger.warning(f"QP недопустима: сертификат найден на итерации {iteration}")
                    x_b, z_b, y_b, _, p_b, d_b = best
                    return self._solution(problem, x_b, z_b, y_b, scale, iteration,
                                          QpStatus.PRIMAL_INFEASIBLE, p_b, d_b)
                stalled = 0

        x_b, z_b, y_b, _, p_b, d_b = best
        logger.debug(f"ADMM: исчерпан предел {max_iters} итераций, невязка {best_residual:.3e}")
        return self._solution(problem, x_b, z_b, y_b, scale, max_iters, QpStatus.MAX_ITERS, p_b, d_b)

    def _initial_iterates(self, problem: QpProblem, warm_start, scale: float
                          ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        n, m = problem.n_vars, problem.n_constraints
        x = np.zeros(n)
        y = np.zeros(m)
        z = None

        if isinstance(warm_start, QpSolution):
            if warm_start.x.shape == (n,):
                x = warm_start.x.astype(float).copy()
            if warm_start.y.shape == (m,):
                y = warm_start.y * scale
            if warm_start.z.shape == (m,):
                z = warm_start.z.copy()
        elif warm_start is not None:
            candidate = np.asarray(warm_start, dtype=float).reshape(-1)
            if candidate.shape == (n,):
                x = candidate.copy()

        if z is None:
            z = np.clip(problem.c @ x, problem.l, problem.u)
        return x, np.clip(z, problem.l, problem.u), y

    @staticmethod
    def _residuals(h, g, c, x, z, y) -> Tuple[float, float]:
        primal = float(np.max(np.abs(c @ x - z))) if z.size else 0.0
        dual = float(np.max(np.abs(h @ x + g + c.T @ y)))
        return primal, dual

    @staticmethod
    def _primal_infeasible(c, lower, upper, delta_y) -> bool:
        """Сертификат недопустимости: Cᵀδy ≈ 0 и uᵀ·max(δy, 0) + lᵀ·min(δy, 0) < 0"""
        norm = float(np.max(np.abs(delta_y)))
        if norm <= 0.0:
            return False
        if np.max(np.abs(c.T @ delta_y)) > INFEASIBILITY_TOL * norm:
            return False

        positive = delta_y > 0
        negative = delta_y < 0
        if np.any(np.isposinf(upper[positive])) or np.any(np.isneginf(lower[negative])):
            return False
        support = upper[positive] @ delta_y[positive] + lower[negative] @ delta_y[negative]
        return bool(support < -INFEASIBILITY_TOL * norm)

    @staticmethod
    def _solution(problem: QpProblem, x, z, y, scale: float, iterations: int,
                  status: QpStatus, primal: float, dual: float) -> QpSolution:
        return QpSolution(
            x=x.copy(),
            y=y / scale,
            z=z.copy(),
            objective=problem.objective(x),
            iterations=iterations,
            status=status,
            primal_residual=primal,
            dual_residual=dual,
        )

    @staticmethod
    def kkt_residuals(problem: QpProblem, solution: QpSolution) -> Dict[str, float]:
        """Невязки ККТ в исходном масштабе: стационарность, допустимость, дополняющая нежесткость"""
        x, y = solution.x, solution.y
        cx = problem.c @ x
        stationarity = float(np.max(np.abs(problem.h @ x + problem.g + problem.c.T @ y)))
        if cx.size == 0:
            return {'stationarity': stationarity, 'feasibility': 0.0, 'complementarity': 0.0}

        violation = np.maximum(problem.l - cx, 0.0) + np.maximum(cx - problem.u, 0.0)
        upper = np.where(np.isposinf(problem.u), cx, problem.u)
        lower = np.where(np.isneginf(problem.l), cx, problem.l)
        upper_gap = np.maximum(y, 0.0) * (upper - cx)
        lower_gap = np.minimum(y, 0.0) * (cx - lower)
        return {
            'stationarity': stationarity,
            'feasibility': float(np.max(violation)),
            'complementarity': float(np.max(np.abs(upper_gap) + np.abs(lower_gap))),
        }
